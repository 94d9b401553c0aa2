// Shared lattice types and the seeded random stream used by the Monte Carlo
// chains.
//
// Units: hbar = k_B = 1, so energies and temperatures are frequencies
// measured in the same unit as the tunneling amplitude.

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace latsol {

enum class ConfigErrorKind { SiteCount, AtomCount, Tunneling, Parameter };

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(ConfigErrorKind kind, const std::string& what)
      : std::invalid_argument(what), kind_(kind) {}
  ConfigErrorKind kind() const noexcept { return kind_; }

 private:
  ConfigErrorKind kind_;
};

/// Ring lattice of `sites` sites holding `atoms` bosons.
/// `delta` is the nearest-neighbour tunneling amplitude, `kappa` the on-site
/// interaction (negative = attractive).
struct LatticeConfig {
  int sites = 2;
  int atoms = 1;
  double delta = 1.0;
  double kappa = 0.0;

  friend bool operator==(const LatticeConfig&, const LatticeConfig&) = default;
};

/// Returns `config` unchanged, or throws ConfigError naming the violated bound.
LatticeConfig validate(const LatticeConfig& config);

/// Dimensionless interaction N*kappa/delta.
double coupling(const LatticeConfig& config);

/// Energy scale max(delta, |kappa| N) used for relative tolerances.
double energy_scale(const LatticeConfig& config);

/// Site index reduced onto the ring [0, sites).
constexpr int wrap_site(long k, int sites) {
  if (k >= 0 && k < sites) return static_cast<int>(k);
  if (k < 0 && k >= -sites) return static_cast<int>(k + sites);
  if (k >= sites && k < 2L * sites) return static_cast<int>(k - sites);
  long r = k % sites;
  return static_cast<int>(r < 0 ? r + sites : r);
}

/// Occupation numbers of every site. Entries are nonnegative.
class NumberState {
 public:
  NumberState() = default;
  explicit NumberState(std::vector<int> occupations);

  int sites() const { return static_cast<int>(n_.size()); }
  long total() const;
  int operator[](int k) const { return n_[static_cast<std::size_t>(k)]; }
  std::span<const int> occupations() const { return n_; }

  /// State whose site k holds this state's site (k + shift) mod L.
  NumberState shifted(int shift) const;

  friend bool operator==(const NumberState&, const NumberState&) = default;
  friend auto operator<=>(const NumberState&, const NumberState&) = default;

 private:
  std::vector<int> n_;
};

using Complex = std::complex<double>;

/// Complex site amplitudes b_k with |b_k|^2 the atom number at site k.
struct ClassicalField {
  std::vector<Complex> amplitudes;

  int sites() const { return static_cast<int>(amplitudes.size()); }
  double norm() const;  // sum_k |b_k|^2
  std::vector<double> occupations() const;
  /// Rescales to sum_k |b_k|^2 = atoms. Throws on a zero field.
  void normalize(double atoms);
  ClassicalField shifted(int shift) const;
};

/// Reproducible random stream. The same (seed, stream_id) pair always yields
/// the same sequence on every platform: mt19937_64 is fully specified and the
/// conversions below avoid the implementation-defined std distributions.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next() { return engine_(); }
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n), n > 0, without modulo bias.
  std::uint64_t index(std::uint64_t n);
  bool coin() { return (engine_() >> 63) != 0; }
  /// Standard normal deviate (Box-Muller, one value per call).
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace latsol
