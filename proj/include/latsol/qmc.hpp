// World-line quantum Monte Carlo for the Bose-Hubbard ring.
//
// The Hamiltonian is split into even bonds (2j, 2j+1) and odd bonds
// (2j+1, 2j+2). Each inverse-temperature step dtau = beta / n_beta becomes two
// half-steps: slice 2t -> 2t+1 propagates the even bonds, slice 2t+1 -> 2t+2
// the odd bonds. A configuration is the occupancy of every site on every one
// of the 2 n_beta slices, periodic in both directions; its weight is the
// product of two-site propagator elements over the active plaquettes.
//
// Every bond carries hopping -delta/2 and a quarter of the on-site
// interaction of each of its two sites. For L = 2 the even and odd bond are
// the same pair of sites; the whole Hamiltonian (hopping -delta, interaction
// kappa/2 per site) is then propagated for dtau/2 in each half-step, which is
// exact.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "latsol/core.hpp"

namespace latsol::qmc {

/// h_bond on the (m+1)-dimensional space n_i = 0..m (n_j = m - n_i), row and
/// column index n_i. On two sites this is the full double-bond Hamiltonian.
Eigen::MatrixXd bond_hamiltonian(const LatticeConfig& config, int bond_total);

/// Cached G_m = exp(-step * h_bond), each block built the first time it is used.
/// Entries are stored as logarithms: the far off-diagonal corner of large
/// blocks is far below the double range.
class BondPropagatorTable {
 public:
  BondPropagatorTable(const LatticeConfig& config, double step);

  double step() const { return step_; }
  int cached_blocks() const {
    return static_cast<int>(std::count_if(log_g_.begin(), log_g_.end(), [](const auto& b) { return !b.empty(); }));
  }

  /// log G_m[after][before]; -inf marks an entry that underflowed.
  double log_weight(int m, int after, int before) {
    if (static_cast<std::size_t>(m) >= log_g_.size() || log_g_[static_cast<std::size_t>(m)].empty()) ensure(m);
    return log_g_[static_cast<std::size_t>(m)][static_cast<std::size_t>(after * (m + 1) + before)];
  }
  /// (h G_m)[after][before] / G_m[after][before], the local energy of a plaquette.
  double local_energy(int m, int after, int before) {
    if (static_cast<std::size_t>(m) >= energy_.size() || energy_[static_cast<std::size_t>(m)].empty()) ensure(m);
    return energy_[static_cast<std::size_t>(m)][static_cast<std::size_t>(after * (m + 1) + before)];
  }
  /// G_m as a dense matrix (for inspection and tests).
  Eigen::MatrixXd block(int m);
  void ensure(int m);

 private:
  LatticeConfig config_;
  double step_;
  std::vector<std::vector<double>> log_g_;
  std::vector<std::vector<double>> energy_;
};

BondPropagatorTable build_propagator_table(const LatticeConfig& config, double step);

/// exp(-step * h) for a tridiagonal matrix with nonpositive off-diagonal entries, by a
/// positive Taylor series with scaling and squaring. Returned as
/// elementwise logarithms. No subtraction ever happens, so every entry keeps
/// full relative precision until it underflows.
Eigen::MatrixXd log_positive_exponential(const Eigen::MatrixXd& h, double step);

enum class SeedingKind { Uniform, Narrow };

struct Seeding {
  SeedingKind kind = SeedingKind::Uniform;
  int center = 0;
  double width = 2.0;
};

struct SamplerConfig {
  double beta = 1.0;
  int n_beta = 0;  // 0: ceil(20 beta max(delta, |kappa| N / L))
  long thermalization_sweeps = 1000;
  bool adaptive_thermalization = true;
  long stride = 10;
  long n_samples = 100;
  std::uint64_t seed = 1;
  std::uint64_t stream_id = 0;
  Seeding seeding;
  bool winding_moves = true;
  bool symmetry_moves = true;
  /// Permit dtau max(delta, |kappa| N) above 0.1 (Trotter-error studies).
  bool allow_coarse_trotter = false;
  int sample_slice = 0;
};

int default_trotter_steps(const LatticeConfig& config, double beta);

/// Checks the lattice (even L) and sampler against each other and resolves
/// n_beta. Throws ConfigError; returns warnings for the soft accuracy guard.
std::vector<std::string> resolve_sampler(const LatticeConfig& config, SamplerConfig& sampler);

/// Occupancy of every site on every slice.
class WorldlineGrid {
 public:
  WorldlineGrid(int sites, int slices);

  int sites() const { return sites_; }
  int slices() const { return slices_; }
  int& at(int slice, int site) { return n_[index(slice, site)]; }
  int at(int slice, int site) const { return n_[index(slice, site)]; }
  NumberState slice_state(int slice) const;
  void set_slice(int slice, const NumberState& state);
  long slice_total(int slice) const;

  /// Plain-text dump: "L n_slices" header, then one row of L integers per slice.
  void write(std::ostream& os) const;
  static WorldlineGrid read(std::istream& is);

  friend bool operator==(const WorldlineGrid&, const WorldlineGrid&) = default;

 private:
  std::size_t index(int slice, int site) const {
    return static_cast<std::size_t>(wrap_site(slice, slices_)) * static_cast<std::size_t>(sites_) +
           static_cast<std::size_t>(wrap_site(site, sites_));
  }
  int sites_;
  int slices_;
  std::vector<int> n_;
};

/// The seed number state, identical on every slice.
NumberState seed_state(const LatticeConfig& config, const Seeding& seeding);
WorldlineGrid seed_grid(const LatticeConfig& config, const SamplerConfig& sampler);

struct MoveCounters {
  long local_attempted = 0;
  long local_accepted = 0;
  long winding_attempted = 0;
  long winding_accepted = 0;
};

/// One Markov chain over world-line configurations.
class WorldlineSampler {
 public:
  /// `sampler` must already be resolved (n_beta > 0).
  WorldlineSampler(const LatticeConfig& config, const SamplerConfig& sampler);

  const WorldlineGrid& grid() const { return grid_; }
  const MoveCounters& counters() const { return counters_; }
  const LatticeConfig& config() const { return config_; }
  int n_beta() const { return n_beta_; }
  BondPropagatorTable& table() { return table_; }

  /// Local move at slice `slice`, moving one atom from `site` to its
  /// neighbour in direction `direction` (+1/-1) across the nearest inactive
  /// plaquette of that bond. On two sites the atom hops at `slice` only.
  /// Returns true if accepted.
  bool local_move(int site, int slice, int direction);
  bool random_local_move();
  /// Moves one atom around the whole ring along a tight staircase of L hops
  /// starting at half-step `start` (sign +1), or straightens such a staircase
  /// back onto `site` (sign -1). Changes the winding number by +-1.
  bool winding_move(int site, int start_half_step, int direction, int sign);
  bool random_winding_move();
  /// Translates the whole configuration by `sites` lattice sites and
  /// `half_steps` slices. The weight is unchanged when both shifts have the
  /// same parity (any shifts for L = 2); other combinations throw.
  void symmetry_move(int sites, int half_steps);
  void random_symmetry_move();
  /// L * 2 n_beta local attempts. Enabled winding moves add n_beta attempts
  /// and enabled symmetry moves one random translation.
  void sweep();

  /// Thermodynamic energy estimator of the current configuration.
  double energy_estimate();
  /// Product of all plaquette weights in log form; -inf if any is zero.
  double log_weight();

  void set_grid(const WorldlineGrid& grid);

 private:
  struct Change {
    int slice, site, delta;
  };
  bool try_changes(const std::vector<Change>& changes);
  double plaquette_log_weight(int half_step, int first_site);
  int bond_start(int site, int half_step) const;

  LatticeConfig config_;
  int n_beta_;
  bool winding_;
  bool symmetry_;
  BondPropagatorTable table_;
  WorldlineGrid grid_;
  RngStream rng_;
  WorldlineGrid spare_;
  MoveCounters counters_;
  double estimator_scale_;
  std::vector<Change> scratch_;
  std::vector<std::pair<int, int>> plaquettes_;
};

struct TracePoint {
  long sweep;
  double energy;
  double acceptance;  // local-move acceptance within this sweep
};

struct QmcRunResult {
  std::vector<NumberState> samples;
  std::vector<int> chain_ids;
  std::vector<double> sample_energies;
  double acceptance_rate = 0.0;          // local moves, whole run
  double winding_acceptance_rate = 0.0;
  long thermalization_sweeps = 0;        // actually performed
  int n_beta = 0;
  double dtau = 0.0;
  std::vector<TracePoint> trace;         // one point per sampling sweep
  double energy_autocorrelation = 0.0;   // integrated time, in retained samples
  std::vector<std::string> warnings;
};

class QmcError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seeds, thermalizes, then keeps one slice every `stride` sweeps.
QmcRunResult run(const LatticeConfig& config, SamplerConfig sampler);

/// Independent chains with stream ids stream_id .. stream_id + chains - 1,
/// run concurrently and concatenated in chain order.
QmcRunResult run_chains(const LatticeConfig& config, const SamplerConfig& sampler, int chains);

struct Estimate {
  double mean = 0.0;
  double variance = 0.0;  // sample variance of f
  double error = 0.0;     // binning error bar of the mean
  int bin_levels = 0;
};

using Observable = std::function<double(const NumberState&)>;

/// Binning analysis on a series: bin sizes 1, 2, 4, ... until the error bar
/// plateaus or fewer than 64 bins remain. The
/// error bar is the largest over those levels.
Estimate binning_estimate(const std::vector<double>& series);

std::vector<Estimate> estimate_observables(const QmcRunResult& result, const std::vector<Observable>& observables);

/// Integrated autocorrelation time from the binning plateau,
/// tau = (err_plateau / err_naive)^2 / 2.
double integrated_autocorrelation(const std::vector<double>& series);

}  // namespace latsol::qmc
