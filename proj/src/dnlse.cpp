#include "latsol/dnlse.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace latsol::dnlse {

namespace {

void check_length(const ClassicalField& field, const LatticeConfig& config) {
  if (field.sites() != config.sites) {
    throw std::invalid_argument("field has " + std::to_string(field.sites()) +
                                " sites, lattice has " + std::to_string(config.sites));
  }
}

using Field = std::vector<Complex>;

void force_into(const Field& b, const LatticeConfig& config, Field& out) {
  const int L = config.sites;
  const double half = 0.5 * config.delta;
  for (int k = 0; k < L; ++k) {
    const auto& bk = b[static_cast<std::size_t>(k)];
    const auto& right = b[static_cast<std::size_t>(wrap_site(k + 1, L))];
    const auto& left = b[static_cast<std::size_t>(wrap_site(k - 1, L))];
    out[static_cast<std::size_t>(k)] = -half * (right + left) + config.kappa * std::norm(bk) * bk;
  }
}

// One classical RK4 step of db/dt = rhs(b).
template <class Rhs>
void rk4_step(Field& b, double dt, Rhs&& rhs) {
  const std::size_t L = b.size();
  Field k1(L), k2(L), k3(L), k4(L), tmp(L);
  rhs(b, k1);
  for (std::size_t i = 0; i < L; ++i) tmp[i] = b[i] + 0.5 * dt * k1[i];
  rhs(tmp, k2);
  for (std::size_t i = 0; i < L; ++i) tmp[i] = b[i] + 0.5 * dt * k2[i];
  rhs(tmp, k3);
  for (std::size_t i = 0; i < L; ++i) tmp[i] = b[i] + dt * k3[i];
  rhs(tmp, k4);
  for (std::size_t i = 0; i < L; ++i) b[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// Largest dt * max(delta, |kappa| |b|^2) actually taken by the real-time integrator.
constexpr double kSubstepLimit = 0.004;

bool all_finite(const Field& b) {
  return std::all_of(b.begin(), b.end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

}  // namespace

std::vector<Complex> mean_field_force(const ClassicalField& field, const LatticeConfig& config) {
  check_length(field, config);
  Field out(field.amplitudes.size());
  force_into(field.amplitudes, config, out);
  return out;
}

double classical_energy(const ClassicalField& field, const LatticeConfig& config) {
  check_length(field, config);
  const int L = config.sites;
  double hop = 0.0;
  double interaction = 0.0;
  for (int k = 0; k < L; ++k) {
    const auto& bk = field.amplitudes[static_cast<std::size_t>(k)];
    const auto& right = field.amplitudes[static_cast<std::size_t>(wrap_site(k + 1, L))];
    const auto& left = field.amplitudes[static_cast<std::size_t>(wrap_site(k - 1, L))];
    hop += (std::conj(right) * bk + std::conj(left) * bk).real();
    interaction += std::norm(bk) * std::norm(bk);
  }
  return -0.5 * config.delta * hop + 0.5 * config.kappa * interaction;
}

double chemical_potential(const ClassicalField& field, const LatticeConfig& config) {
  const auto force = mean_field_force(field, config);
  Complex s = 0.0;
  for (std::size_t k = 0; k < force.size(); ++k) s += std::conj(field.amplitudes[k]) * force[k];
  return s.real() / field.norm();
}

double stationarity_residual(const ClassicalField& field, const LatticeConfig& config) {
  const auto force = mean_field_force(field, config);
  const double mu = chemical_potential(field, config);
  double r2 = 0.0;
  for (std::size_t k = 0; k < force.size(); ++k) r2 += std::norm(force[k] - mu * field.amplitudes[k]);
  return std::sqrt(r2);
}

bool step_within_guideline(const ClassicalField& field, const LatticeConfig& config, double dt) {
  const auto n = field.occupations();
  const double peak = n.empty() ? 0.0 : *std::max_element(n.begin(), n.end());
  return dt * std::max(config.delta, std::abs(config.kappa) * peak) <= 0.1;
}

ClassicalField real_time_evolve(const ClassicalField& field, const LatticeConfig& config, double t,
                                double dt) {
  check_length(field, config);
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (t < 0.0) throw std::invalid_argument("evolution time must be nonnegative");
  if (!step_within_guideline(field, config, dt)) {
    std::cerr << "warning: real-time step " << dt << " exceeds the stability guideline\n";
  }
  const long steps = static_cast<long>(std::ceil(t / dt - 1e-12));
  if (steps == 0) return field;
  const double h = t / static_cast<double>(steps);
  Field b = field.amplitudes;
  const Complex minus_i{0.0, -1.0};
  auto rhs = [&](const Field& x, Field& out) {
    force_into(x, config, out);
    for (auto& z : out) z *= minus_i;
  };
  for (long s = 0; s < steps; ++s) {
    double peak = 0.0;
    for (const auto& z : b) peak = std::max(peak, std::norm(z));
    const double rate = std::max(config.delta, std::abs(config.kappa) * peak);
    const long sub = std::max(1L, static_cast<long>(std::ceil(h * rate / kSubstepLimit)));
    for (long j = 0; j < sub; ++j) rk4_step(b, h / static_cast<double>(sub), rhs);
    if (!all_finite(b)) throw std::runtime_error("real-time evolution produced a non-finite field");
  }
  return ClassicalField{std::move(b)};
}

double default_dtau(const LatticeConfig& config) {
  return 0.02 / std::max(config.delta, std::abs(config.kappa) * config.atoms / config.sites);
}

SolitonResult imaginary_time_ground_state(const LatticeConfig& config, ClassicalField seed,
                                          const RelaxOptions& options) {
  validate(config);
  check_length(seed, config);
  const double atoms = config.atoms;
  const double dtau = options.dtau > 0.0 ? options.dtau : default_dtau(config);
  const double scale = energy_scale(config);
  const double residual_bound = options.residual_tol * std::sqrt(atoms) * scale;

  seed.normalize(atoms);
  Field b = std::move(seed.amplitudes);
  double energy = classical_energy(ClassicalField{b}, config);

  // Gradient flow projected onto the sphere |b|^2 = N: db/dtau = -(H_eff b - mu(b) b).
  // Its fixed points are exactly the stationary states.
  auto rhs = [&](const Field& x, Field& out) {
    force_into(x, config, out);
    Complex overlap = 0.0;
    double norm = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      overlap += std::conj(x[k]) * out[k];
      norm += std::norm(x[k]);
    }
    const double mu = overlap.real() / norm;
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = mu * x[k] - out[k];
  };

  SolitonResult result;
  long iter = 0;
  while (iter < options.max_iter) {
    rk4_step(b, dtau, rhs);
    if (!all_finite(b)) throw std::runtime_error("imaginary-time relaxation produced a non-finite field");
    ClassicalField current{b};
    current.normalize(atoms);
    b = current.amplitudes;
    ++iter;
    const double next = classical_energy(current, config);
    if (options.observer) options.observer(iter, next);
    const double rate = std::abs(next - energy) / (std::max(std::abs(energy), config.delta * atoms) * dtau);
    energy = next;
    if (rate < options.tol && stationarity_residual(current, config) <= residual_bound) {
      result.converged = true;
      break;
    }
  }
  result.field = ClassicalField{std::move(b)};
  result.energy = energy;
  result.mu = chemical_potential(result.field, config);
  result.residual = stationarity_residual(result.field, config);
  result.iterations = iter;
  return result;
}

ClassicalField gaussian_seed(const LatticeConfig& config, int center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("seed width must be positive");
  const int L = config.sites;
  ClassicalField f{std::vector<Complex>(static_cast<std::size_t>(L))};
  for (int k = 0; k < L; ++k) {
    const int d = std::min(wrap_site(k - center, L), wrap_site(center - k, L));
    f.amplitudes[static_cast<std::size_t>(k)] = std::exp(-0.5 * d * d / (width * width));
  }
  f.normalize(config.atoms);
  return f;
}

ClassicalField default_seed(const LatticeConfig& config) {
  return gaussian_seed(config, config.sites / 2, 2.0);
}

ClassicalField noisy_uniform_seed(const LatticeConfig& config, double noise, RngStream& rng) {
  ClassicalField f{std::vector<Complex>(static_cast<std::size_t>(config.sites))};
  for (auto& b : f.amplitudes) b = Complex{1.0 + noise * rng.normal(), noise * rng.normal()};
  f.normalize(config.atoms);
  return f;
}

}  // namespace latsol::dnlse
