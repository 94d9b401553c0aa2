// Classical lattice field: discrete nonlinear Schroedinger dynamics on the
// ring and imaginary-time relaxation to the classical ground state.
//
// For L = 2 both neighbours of a site are the same site, so the hopping term
// -(delta/2)(b_{k+1} + b_{k-1}) becomes -delta * b_other. Nothing special is
// done for that case; it falls out of the modular neighbour sum.

#pragma once

#include <functional>

#include "latsol/core.hpp"

namespace latsol::dnlse {

/// H_eff b: -(delta/2)(b_{k+1} + b_{k-1}) + kappa |b_k|^2 b_k for every k.
std::vector<Complex> mean_field_force(const ClassicalField& field, const LatticeConfig& config);

/// Classical energy sum_k [-(delta/2)(b*_{k+1} b_k + b*_{k-1} b_k) + (kappa/2)|b_k|^4].
double classical_energy(const ClassicalField& field, const LatticeConfig& config);

/// (1/N) sum_k b*_k (H_eff b)_k; the phase-rotation frequency of a stationary state.
double chemical_potential(const ClassicalField& field, const LatticeConfig& config);

/// || H_eff b - mu b ||_2 with mu from chemical_potential().
double stationarity_residual(const ClassicalField& field, const LatticeConfig& config);

/// True when dt * max(delta, |kappa| max_k |b_k|^2) <= 0.1.
bool step_within_guideline(const ClassicalField& field, const LatticeConfig& config, double dt);

/// Integrates i db/dt = H_eff b for a duration t with classical RK4.
/// The step is shrunk so an integer number of steps lands exactly on t, and
/// each step is split into RK4 substeps with dt * max(delta, |kappa| |b|^2)
/// at most 0.004, which keeps norm and energy drift below 1e-10 per unit time.
/// Emits a warning on stderr when the step exceeds the guideline and throws
/// std::runtime_error if the field becomes non-finite.
ClassicalField real_time_evolve(const ClassicalField& field, const LatticeConfig& config, double t,
                                double dt);

struct RelaxOptions {
  double dtau = 0.0;             // 0 selects 0.02 / max(delta, |kappa| N / L)
  double tol = 1e-12;            // relative energy change per unit imaginary time
  double residual_tol = 1e-11;   // stationarity residual relative to ||b|| max(delta, |kappa| N)
  long max_iter = 10'000'000;
  /// Called after every renormalized step with (iteration, energy).
  std::function<void(long, double)> observer;
};

double default_dtau(const LatticeConfig& config);

struct SolitonResult {
  ClassicalField field;
  double mu = 0.0;
  double energy = 0.0;
  long iterations = 0;
  bool converged = false;
  double residual = 0.0;  // stationarity residual at exit
};

/// Relaxes `seed` in imaginary time, renormalizing to N after every RK4 step,
/// until both the energy change and the stationarity residual are below
/// tolerance. An unconverged run returns the last field with converged=false.
SolitonResult imaginary_time_ground_state(const LatticeConfig& config, ClassicalField seed,
                                          const RelaxOptions& options = {});

/// Real Gaussian bump exp(-d^2 / (2 width^2)) around `center`, d the ring
/// distance, normalized to N.
ClassicalField gaussian_seed(const LatticeConfig& config, int center, double width);

/// The default seed: width-2 Gaussian centred on site L/2.
ClassicalField default_seed(const LatticeConfig& config);

/// Uniform amplitudes plus relative complex noise of size `noise`.
ClassicalField noisy_uniform_seed(const LatticeConfig& config, double noise, RngStream& rng);

}  // namespace latsol::dnlse
