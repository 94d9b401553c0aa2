// Exact quantum solution of the Bose-Hubbard ring in the number-conserving
// Fock basis, down to the number-state distributions P(n) an ideal
// experiment would measure.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "latsol/core.hpp"

namespace latsol::exact {

/// C(N + L - 1, L - 1); saturates at UINT64_MAX on overflow.
std::uint64_t basis_dimension(int sites, int atoms);

inline constexpr std::uint64_t kMaxBasisDimension = 10'000'000;
inline constexpr int kDenseLimit = 2000;

/// All number states with sum N, ordered lexicographically descending:
/// (N,0,...,0) first, (0,...,0,N) last. Ranking is combinatorial, so index()
/// needs no lookup table.
class FockBasis {
 public:
  explicit FockBasis(const LatticeConfig& config);

  const LatticeConfig& config() const { return config_; }
  std::size_t size() const { return dim_; }
  std::span<const int> occupations(std::size_t i) const {
    return {flat_.data() + i * static_cast<std::size_t>(config_.sites), static_cast<std::size_t>(config_.sites)};
  }
  NumberState state(std::size_t i) const;
  /// Position of `n` in the ordering. Throws if n has the wrong length or total.
  std::size_t index(std::span<const int> n) const;
  std::size_t index(const NumberState& n) const { return index(n.occupations()); }

 private:
  // count_[s][r]: number of ways to place r atoms on s sites.
  std::uint64_t compositions(int sites, int atoms) const;

  LatticeConfig config_;
  std::size_t dim_ = 0;
  std::vector<int> flat_;
  std::vector<std::vector<std::uint64_t>> count_;
};

FockBasis enumerate_basis(const LatticeConfig& config);

/// Sparse symmetric real matrix in CSR form with a separate diagonal.
class HamiltonianMatrix {
 public:
  struct Entry {
    std::size_t row, col;
    double value;
  };

  HamiltonianMatrix(LatticeConfig config, std::vector<double> diagonal,
                    std::vector<std::size_t> row_start, std::vector<std::size_t> cols,
                    std::vector<double> values);

  const LatticeConfig& config() const { return config_; }
  std::size_t dimension() const { return diagonal_.size(); }
  double diagonal(std::size_t i) const { return diagonal_[i]; }
  std::size_t off_diagonal_count(std::size_t row) const { return row_start_[row + 1] - row_start_[row]; }
  std::vector<Entry> off_diagonal_entries() const;
  /// Stored value at (i, j), 0 if absent.
  double at(std::size_t i, std::size_t j) const;

  /// out = H in. Serial and in fixed order, so results are bit-stable.
  void multiply(std::span<const double> in, std::span<double> out) const;
  Eigen::MatrixXd dense() const;
  /// Gershgorin bound on the spectral radius.
  double norm_bound() const;

 private:
  LatticeConfig config_;
  std::vector<double> diagonal_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

HamiltonianMatrix build_hamiltonian(const FockBasis& basis);

struct SpectralResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, orthonormal
  double degeneracy_tol = 1e-6;
  int degenerate_count = 1;      // states within degeneracy_tol * scale of E0
};

inline constexpr double kDefaultDegeneracyTol = 1e-6;

/// The `count` lowest eigenpairs. Dense solver up to kDenseLimit, otherwise
/// deflated Lanczos with full reorthogonalization.
SpectralResult ground_states(const HamiltonianMatrix& h, int count,
                             double degeneracy_tol = kDefaultDegeneracyTol);

/// Always uses the deflated Lanczos path; exposed for testing it on small systems.
SpectralResult lanczos_ground_states(const HamiltonianMatrix& h, int count,
                                     double degeneracy_tol = kDefaultDegeneracyTol);

/// The full spectrum (dense; dimension <= kDenseLimit).
SpectralResult full_spectrum(const HamiltonianMatrix& h, double degeneracy_tol = kDefaultDegeneracyTol);

enum class DistributionSource { ZeroTemperatureMixture, Thermal };

struct NumberDistribution {
  FockBasis basis;
  std::vector<double> probabilities;  // aligned with basis order
  DistributionSource source = DistributionSource::Thermal;
  double beta = 0.0;                  // thermal only

  /// For L = 2: P_n that site 0 holds n atoms, n = 0..N.
  std::vector<double> two_site_marginal() const;
};

/// Equal mixture of the flagged-degenerate ground states.
NumberDistribution zero_temp_distribution(const SpectralResult& spectral, const FockBasis& basis);

/// Equal mixture of the `count` lowest states regardless of degeneracy flags.
NumberDistribution mixture_distribution(const SpectralResult& spectral, const FockBasis& basis, int count);

/// Diagonal of exp(-beta H) in the number basis, normalized.
NumberDistribution thermal_distribution(const HamiltonianMatrix& h, const FockBasis& basis, double beta);

double expectation(const std::function<double(std::span<const int>)>& f, const NumberDistribution& dist);

struct TwoSiteCurve {
  int atoms = 0;
  double kappa = 0.0;
  std::vector<double> probabilities;  // P_n, n = 0..N
  double splitting = 0.0;             // E1 - E0
};

/// Two-site ground-state statistics at fixed Lambda = N kappa / delta for
/// each N: 50/50 mixture of the two lowest states.
std::vector<TwoSiteCurve> two_site_scan(std::span<const int> atom_numbers, double lambda, double delta = 1.0);

}  // namespace latsol::exact
