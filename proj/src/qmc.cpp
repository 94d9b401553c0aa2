#include "latsol/qmc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace latsol::qmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd bond_hamiltonian(const LatticeConfig& config, int bond_total) {
  if (bond_total < 0) throw std::invalid_argument("bond total must be nonnegative");
  const bool two_site = config.sites == 2;
  const double hop = two_site ? config.delta : 0.5 * config.delta;
  const double share = two_site ? 0.5 * config.kappa : 0.25 * config.kappa;
  const int m = bond_total;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (int a = 0; a <= m; ++a) {
    const double b = m - a;
    h(a, a) = share * (static_cast<double>(a) * (a - 1) + b * (b - 1));
    if (a < m) {
      // b_i^dagger b_j: (a, m-a) -> (a+1, m-a-1)
      const double amp = -hop * std::sqrt(static_cast<double>(a + 1) * (m - a));
      h(a + 1, a) = amp;
      h(a, a + 1) = amp;
    }
  }
  return h;
}

Eigen::MatrixXd log_positive_exponential(const Eigen::MatrixXd& h, double step) {
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd a = -step * h;
  double shift = a.diagonal().minCoeff();
  a.diagonal().array() -= shift;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(i - j) > 1 && a(i, j) != 0.0) {
        throw std::invalid_argument("positive exponential needs a tridiagonal matrix");
      }
      if (a(i, j) < 0.0) {
        if (a(i, j) < -1e-14 * std::max(1.0, std::abs(shift))) {
          throw std::invalid_argument("positive exponential needs nonpositive off-diagonal entries");
        }
        a(i, j) = 0.0;
      }
    }
  }
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const double scale = std::ldexp(1.0, -squarings);

  // Extended precision for its exponent range: the corner entries of large
  // blocks are far below the smallest double.
  using Wide = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const Wide b = (a * scale).cast<long double>();
  // The term of order k first reaches entries k places off the diagonal, so
  // the series must run well past (n / 2^s) for the corner entries.
  const int terms = std::max<int>(30, static_cast<int>(std::ceil(static_cast<double>(n) * scale)) + 20);
  Wide sum = Wide::Identity(n, n);
  Wide term = Wide::Identity(n, n);
  Wide next(n, n);
  for (int k = 1; k <= terms; ++k) {
    // b is tridiagonal.
    const long double inv_k = 1.0L / static_cast<long double>(k);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, j - 1), hi = std::min<Eigen::Index>(n - 1, j + 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        long double acc = 0.0L;
        for (Eigen::Index l = lo; l <= hi; ++l) acc += term(i, l) * b(l, j);
        next(i, j) = acc * inv_k;
      }
    }
    std::swap(term, next);
    sum += term;
  }
  long double log_scale = 0.0L;
  for (int s = 0; s < squarings; ++s) {
    const long double mx = sum.maxCoeff();
    sum /= mx;
    log_scale = 2.0L * (log_scale + std::log(mx));
    sum = sum * sum;
  }
  // exp(-step h) = e^{shift} exp(a)
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = sum(i, j) > 0.0L ? static_cast<double>(std::log(sum(i, j)) + log_scale) + shift : kNegInf;
    }
  }
  return out;
}

BondPropagatorTable::BondPropagatorTable(const LatticeConfig& config, double step)
    : config_(config), step_(step) {
  if (!(step > 0.0)) throw std::invalid_argument("propagator step must be positive");
}

void BondPropagatorTable::ensure(int m) {
  if (m < 0) throw std::out_of_range("negative bond total");
  const auto mm = static_cast<std::size_t>(m);
  if (log_g_.size() <= mm) {
    log_g_.resize(mm + 1);
    energy_.resize(mm + 1);
  }
  if (!log_g_[mm].empty()) return;
  const Eigen::MatrixXd h = bond_hamiltonian(config_, m);
  const Eigen::MatrixXd lg = log_positive_exponential(h, step_);
  const int dim = m + 1;
  std::vector<double> logs(static_cast<std::size_t>(dim * dim));
  std::vector<double> energy(static_cast<std::size_t>(dim * dim), 0.0);
  for (int after = 0; after < dim; ++after) {
    for (int before = 0; before < dim; ++before) {
      const double here = lg(after, before);
      logs[static_cast<std::size_t>(after * dim + before)] = here;
      if (!std::isfinite(here)) continue;
      // (h G)[after][before] / G[after][before], h tridiagonal.
      double e = h(after, after);
      for (int nb : {after - 1, after + 1}) {
        if (nb < 0 || nb >= dim) continue;
        const double other = lg(nb, before);
        if (std::isfinite(other)) e += h(after, nb) * std::exp(other - here);
      }
      energy[static_cast<std::size_t>(after * dim + before)] = e;
    }
  }
  log_g_[mm] = std::move(logs);
  energy_[mm] = std::move(energy);
}

Eigen::MatrixXd BondPropagatorTable::block(int m) {
  ensure(m);
  Eigen::MatrixXd g(m + 1, m + 1);
  for (int a = 0; a <= m; ++a) {
    for (int b = 0; b <= m; ++b) g(a, b) = std::exp(log_weight(m, a, b));
  }
  return g;
}

BondPropagatorTable build_propagator_table(const LatticeConfig& config, double step) {
  return BondPropagatorTable(config, step);
}

int default_trotter_steps(const LatticeConfig& config, double beta) {
  const double rate = std::max(config.delta, std::abs(config.kappa) * config.atoms / config.sites);
  return std::max(1, static_cast<int>(std::ceil(20.0 * beta * rate - 1e-9)));
}

std::vector<std::string> resolve_sampler(const LatticeConfig& config, SamplerConfig& sampler) {
  validate(config);
  if (config.sites != 2 && config.sites % 2 != 0) {
    throw ConfigError(ConfigErrorKind::SiteCount,
                      "checkerboard decomposition needs an even number of sites, got " +
                          std::to_string(config.sites));
  }
  if (!(sampler.beta > 0.0) || !std::isfinite(sampler.beta)) {
    throw ConfigError(ConfigErrorKind::Parameter, "beta must be positive");
  }
  if (sampler.n_beta < 0) throw ConfigError(ConfigErrorKind::Parameter, "n_beta must be nonnegative");
  if (sampler.n_beta == 0) sampler.n_beta = default_trotter_steps(config, sampler.beta);
  if (sampler.stride < 1) throw ConfigError(ConfigErrorKind::Parameter, "stride must be at least 1");
  if (sampler.n_samples < 0) throw ConfigError(ConfigErrorKind::Parameter, "sample count must be nonnegative");
  if (sampler.thermalization_sweeps < 0) {
    throw ConfigError(ConfigErrorKind::Parameter, "thermalization sweeps must be nonnegative");
  }
  if (sampler.sample_slice < 0 || sampler.sample_slice >= 2 * sampler.n_beta) {
    throw ConfigError(ConfigErrorKind::Parameter, "sample slice out of range");
  }
  if (sampler.seeding.kind == SeedingKind::Narrow) {
    if (!(sampler.seeding.width > 0.0)) throw ConfigError(ConfigErrorKind::Parameter, "seed width must be positive");
    if (sampler.seeding.center < 0 || sampler.seeding.center >= config.sites) {
      throw ConfigError(ConfigErrorKind::Parameter, "seed center out of range");
    }
  }
  std::vector<std::string> warnings;
  const double guard = sampler.beta / sampler.n_beta * std::max(config.delta, std::abs(config.kappa) * config.atoms);
  if (guard > 0.1) {
    if (!sampler.allow_coarse_trotter) {
      std::ostringstream os;
      os << "dtau * max(delta, |kappa| N) = " << guard << " exceeds 0.1; raise n_beta";
      throw ConfigError(ConfigErrorKind::Parameter, os.str());
    }
    warnings.push_back("coarse Trotter step allowed explicitly: dtau * max(delta, |kappa| N) = " +
                       std::to_string(guard));
  } else if (guard > 0.05) {
    warnings.push_back("dtau * max(delta, |kappa| N) = " + std::to_string(guard) + " is above 0.05");
  }
  return warnings;
}

WorldlineGrid::WorldlineGrid(int sites, int slices)
    : sites_(sites), slices_(slices), n_(static_cast<std::size_t>(sites) * static_cast<std::size_t>(slices), 0) {
  if (sites < 1 || slices < 1) throw std::invalid_argument("grid needs positive dimensions");
}

NumberState WorldlineGrid::slice_state(int slice) const {
  const auto first = n_.begin() + static_cast<std::ptrdiff_t>(index(slice, 0));
  return NumberState(std::vector<int>(first, first + sites_));
}

void WorldlineGrid::set_slice(int slice, const NumberState& state) {
  if (state.sites() != sites_) throw std::invalid_argument("state length does not match grid");
  for (int k = 0; k < sites_; ++k) at(slice, k) = state[k];
}

long WorldlineGrid::slice_total(int slice) const {
  long s = 0;
  for (int k = 0; k < sites_; ++k) s += at(slice, k);
  return s;
}

void WorldlineGrid::write(std::ostream& os) const {
  os << sites_ << ' ' << slices_ << '\n';
  for (int s = 0; s < slices_; ++s) {
    for (int k = 0; k < sites_; ++k) os << (k ? " " : "") << at(s, k);
    os << '\n';
  }
}

WorldlineGrid WorldlineGrid::read(std::istream& is) {
  int sites = 0, slices = 0;
  if (!(is >> sites >> slices) || sites < 1 || slices < 1) throw std::runtime_error("bad grid header");
  WorldlineGrid g(sites, slices);
  for (int s = 0; s < slices; ++s) {
    for (int k = 0; k < sites; ++k) {
      if (!(is >> g.at(s, k)) || g.at(s, k) < 0) throw std::runtime_error("bad grid row");
    }
  }
  return g;
}

NumberState seed_state(const LatticeConfig& config, const Seeding& seeding) {
  const int L = config.sites;
  const int N = config.atoms;
  std::vector<int> n(static_cast<std::size_t>(L), 0);
  if (seeding.kind == SeedingKind::Uniform) {
    // Remainder atoms go to the lowest-numbered sites.
    for (int k = 0; k < L; ++k) n[static_cast<std::size_t>(k)] = N / L + (k < N % L ? 1 : 0);
    return NumberState(std::move(n));
  }
  if (!(seeding.width > 0.0)) throw ConfigError(ConfigErrorKind::Parameter, "seed width must be positive");
  if (seeding.center < 0 || seeding.center >= L) throw ConfigError(ConfigErrorKind::Parameter, "seed center out of range");
  std::vector<double> w(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) {
    const int d = std::min(wrap_site(k - seeding.center, L), wrap_site(seeding.center - k, L));
    w[static_cast<std::size_t>(k)] = std::exp(-0.5 * d * d / (seeding.width * seeding.width));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  int placed = 0;
  for (int k = 0; k < L; ++k) {
    n[static_cast<std::size_t>(k)] = static_cast<int>(std::floor(N * w[static_cast<std::size_t>(k)] / total));
    placed += n[static_cast<std::size_t>(k)];
  }
  n[static_cast<std::size_t>(seeding.center)] += N - placed;
  return NumberState(std::move(n));
}

WorldlineGrid seed_grid(const LatticeConfig& config, const SamplerConfig& sampler) {
  const int n_beta = sampler.n_beta > 0 ? sampler.n_beta : default_trotter_steps(config, sampler.beta);
  WorldlineGrid g(config.sites, 2 * n_beta);
  const NumberState s = seed_state(config, sampler.seeding);
  for (int t = 0; t < g.slices(); ++t) g.set_slice(t, s);
  return g;
}

WorldlineSampler::WorldlineSampler(const LatticeConfig& config, const SamplerConfig& sampler)
    : config_(config),
      n_beta_(sampler.n_beta),
      winding_(sampler.winding_moves && config.sites >= 4 && 2 * sampler.n_beta >= config.sites),
      symmetry_(sampler.symmetry_moves),
      table_(config, config.sites == 2 ? sampler.beta / (2.0 * sampler.n_beta) : sampler.beta / sampler.n_beta),
      grid_(seed_grid(config, sampler)),
      rng_(sampler.seed, sampler.stream_id),
      spare_(grid_),
      estimator_scale_(config.sites == 2 ? 1.0 / (2.0 * sampler.n_beta) : 1.0 / sampler.n_beta) {
  if (n_beta_ < 1) throw std::invalid_argument("sampler must be resolved before use");
  scratch_.reserve(static_cast<std::size_t>(2 * config.sites));
  plaquettes_.reserve(static_cast<std::size_t>(4 * config.sites));
}

void WorldlineSampler::set_grid(const WorldlineGrid& grid) {
  if (grid.sites() != grid_.sites() || grid.slices() != grid_.slices()) {
    throw std::invalid_argument("grid shape does not match the sampler");
  }
  grid_ = grid;
  spare_ = grid;
}

int WorldlineSampler::bond_start(int site, int half_step) const {
  const int parity = wrap_site(half_step, grid_.slices()) % 2;
  return (site % 2 == parity) ? site : wrap_site(site - 1, config_.sites);
}

double WorldlineSampler::plaquette_log_weight(int half_step, int first_site) {
  const int L = config_.sites;
  const int S = grid_.slices();
  const int lower = wrap_site(half_step, S);
  const int upper = lower + 1 == S ? 0 : lower + 1;
  const int i = wrap_site(first_site, L);
  const int j = i + 1 == L ? 0 : i + 1;
  const int a = grid_.at(lower, i);
  const int b = grid_.at(lower, j);
  const int a2 = grid_.at(upper, i);
  const int b2 = grid_.at(upper, j);
  if (a + b != a2 + b2) return kNegInf;
  return table_.log_weight(a + b, a2, a);
}

bool WorldlineSampler::try_changes(const std::vector<Change>& changes) {
  for (const auto& c : changes) {
    if (grid_.at(c.slice, c.site) + c.delta < 0) return false;
  }
  const int S = grid_.slices();
  plaquettes_.clear();
  auto add = [&](int half_step, int site) {
    const std::pair<int, int> p{wrap_site(half_step, S), bond_start(site, half_step)};
    if (std::find(plaquettes_.begin(), plaquettes_.end(), p) == plaquettes_.end()) plaquettes_.push_back(p);
  };
  for (const auto& c : changes) {
    add(c.slice - 1, c.site);
    add(c.slice, c.site);
  }
  double before = 0.0;
  for (const auto& [h, k] : plaquettes_) before += plaquette_log_weight(h, k);
  for (const auto& c : changes) grid_.at(c.slice, c.site) += c.delta;
  double after = 0.0;
  for (const auto& [h, k] : plaquettes_) {
    after += plaquette_log_weight(h, k);
    if (after == kNegInf) break;
  }
  bool accept = after != kNegInf;
  if (accept && std::isfinite(before)) {
    const double log_ratio = after - before;
    accept = log_ratio >= 0.0 || rng_.uniform() < std::exp(log_ratio);
  }
  if (!accept) {
    for (const auto& c : changes) grid_.at(c.slice, c.site) -= c.delta;
  }
  return accept;
}

bool WorldlineSampler::local_move(int site, int slice, int direction) {
  const int L = config_.sites;
  const int S = grid_.slices();
  const int from = wrap_site(site, L);
  const int to = wrap_site(from + direction, L);
  const int s = wrap_site(slice, S);
  int h = s;
  if (L != 2) {
    const int start = direction > 0 ? from : to;
    // The world line must cross a plaquette where this bond is inactive.
    if (start % 2 == s % 2) h = wrap_site(s - 1, S);
  }
  ++counters_.local_attempted;
  if (L >= 4) {
    // The four touched plaquettes are distinct: the bond itself below and
    // above, and the active partners of each site in between.
    if (grid_.at(h, from) == 0 || grid_.at(h + 1, from) == 0) return false;
    const int first = direction > 0 ? from : to;
    const int touched[4][2] = {{h - 1, first}, {h, bond_start(from, h)}, {h, bond_start(to, h)}, {h + 1, first}};
    double before = 0.0;
    for (const auto& p : touched) before += plaquette_log_weight(p[0], p[1]);
    grid_.at(h, from) -= 1;
    grid_.at(h + 1, from) -= 1;
    grid_.at(h, to) += 1;
    grid_.at(h + 1, to) += 1;
    double after = 0.0;
    for (const auto& p : touched) after += plaquette_log_weight(p[0], p[1]);
    const double log_ratio = after - before;
    if (after != kNegInf && (!std::isfinite(before) || log_ratio >= 0.0 || rng_.uniform() < std::exp(log_ratio))) {
      ++counters_.local_accepted;
      return true;
    }
    grid_.at(h, from) += 1;
    grid_.at(h + 1, from) += 1;
    grid_.at(h, to) -= 1;
    grid_.at(h + 1, to) -= 1;
    return false;
  }
  // L = 2: the double bond is active on every half-step, so the atom hops
  // at slice h alone and only the plaquettes below and above change.
  scratch_.clear();
  scratch_.push_back({h, from, -1});
  scratch_.push_back({h, to, +1});
  const bool ok = try_changes(scratch_);
  if (ok) ++counters_.local_accepted;
  return ok;
}

bool WorldlineSampler::random_local_move() {
  const int site = static_cast<int>(rng_.index(static_cast<std::uint64_t>(config_.sites)));
  const int slice = static_cast<int>(rng_.index(static_cast<std::uint64_t>(grid_.slices())));
  const int direction = rng_.coin() ? 1 : -1;
  return local_move(site, slice, direction);
}

bool WorldlineSampler::winding_move(int site, int start_half_step, int direction, int sign) {
  const int L = config_.sites;
  const int S = grid_.slices();
  if (L < 4 || S < L) throw std::logic_error("winding moves need L >= 4 and at least L slices");
  const int k0 = wrap_site(site, L);
  const int first_bond = direction > 0 ? k0 : wrap_site(k0 - 1, L);
  if (wrap_site(start_half_step, S) % 2 != first_bond % 2) {
    throw std::invalid_argument("staircase must start on a half-step where its first bond is active");
  }
  scratch_.clear();
  for (int r = 1; r < L; ++r) {
    scratch_.push_back({start_half_step + r, wrap_site(k0 + direction * r, L), sign});
    scratch_.push_back({start_half_step + r, k0, -sign});
  }
  ++counters_.winding_attempted;
  const bool ok = try_changes(scratch_);
  if (ok) ++counters_.winding_accepted;
  return ok;
}

bool WorldlineSampler::random_winding_move() {
  const int L = config_.sites;
  const int k0 = static_cast<int>(rng_.index(static_cast<std::uint64_t>(L)));
  const int direction = rng_.coin() ? 1 : -1;
  const int sign = rng_.coin() ? 1 : -1;
  const int first_bond = direction > 0 ? k0 : wrap_site(k0 - 1, L);
  const int start = 2 * static_cast<int>(rng_.index(static_cast<std::uint64_t>(n_beta_))) + first_bond % 2;
  return winding_move(k0, start, direction, sign);
}

void WorldlineSampler::symmetry_move(int sites, int half_steps) {
  const int L = config_.sites;
  const int S = grid_.slices();
  if (L != 2 && wrap_site(sites, 2) != wrap_site(half_steps, 2)) {
    throw std::invalid_argument("site and slice shifts of different parity change the weight");
  }
  for (int t = 0; t < S; ++t) {
    for (int k = 0; k < L; ++k) spare_.at(t + half_steps, k + sites) = grid_.at(t, k);
  }
  std::swap(grid_, spare_);
}

void WorldlineSampler::random_symmetry_move() {
  const int L = config_.sites;
  const int half_steps = static_cast<int>(rng_.index(static_cast<std::uint64_t>(grid_.slices())));
  int sites = static_cast<int>(rng_.index(static_cast<std::uint64_t>(L)));
  if (L != 2 && sites % 2 != half_steps % 2) sites = wrap_site(sites + 1, L);
  symmetry_move(sites, half_steps);
}

void WorldlineSampler::sweep() {
  const long attempts = static_cast<long>(config_.sites) * grid_.slices();
  for (long i = 0; i < attempts; ++i) random_local_move();
  if (winding_) {
    for (int i = 0; i < n_beta_; ++i) random_winding_move();
  }
  if (symmetry_) random_symmetry_move();
}

double WorldlineSampler::energy_estimate() {
  const int L = config_.sites;
  const int S = grid_.slices();
  double sum = 0.0;
  for (int h = 0; h < S; ++h) {
    for (int k = h % 2; k < L; k += 2) {
      const int second = wrap_site(k + 1, L);
      const int a = grid_.at(h, k);
      const int a2 = grid_.at(h + 1, k);
      sum += table_.local_energy(a + grid_.at(h, second), a2, a);
    }
  }
  return estimator_scale_ * sum;
}

double WorldlineSampler::log_weight() {
  const int L = config_.sites;
  const int S = grid_.slices();
  double sum = 0.0;
  for (int h = 0; h < S; ++h) {
    for (int k = h % 2; k < L; k += 2) sum += plaquette_log_weight(h, k);
  }
  return sum;
}

namespace {

double mean_of(const std::vector<double>& v, std::size_t first, std::size_t last) {
  return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(first), v.begin() + static_cast<std::ptrdiff_t>(last), 0.0) /
         static_cast<double>(last - first);
}

double var_of(const std::vector<double>& v, std::size_t first, std::size_t last, double mean) {
  double s = 0.0;
  for (std::size_t i = first; i < last; ++i) s += (v[i] - mean) * (v[i] - mean);
  return s / static_cast<double>(last - first - 1);
}

// Last two windows of the energy series agree within one combined standard error.
bool plateaued(const std::vector<double>& energies, std::size_t window) {
  if (energies.size() < 2 * window) return false;
  const std::size_t n = energies.size();
  const double m1 = mean_of(energies, n - 2 * window, n - window);
  const double m2 = mean_of(energies, n - window, n);
  const double v1 = var_of(energies, n - 2 * window, n - window, m1);
  const double v2 = var_of(energies, n - window, n, m2);
  const double sigma = std::sqrt((v1 + v2) / static_cast<double>(window));
  return std::abs(m2 - m1) <= sigma;
}

}  // namespace

QmcRunResult run(const LatticeConfig& config, SamplerConfig sampler) {
  QmcRunResult result;
  result.warnings = resolve_sampler(config, sampler);
  result.n_beta = sampler.n_beta;
  result.dtau = sampler.beta / sampler.n_beta;

  WorldlineSampler chain(config, sampler);
  const std::size_t window = 100;
  const long cap = std::max<long>(10 * sampler.thermalization_sweeps, 2000);
  std::vector<double> energies;
  long done = 0;
  while (done < sampler.thermalization_sweeps ||
         (sampler.adaptive_thermalization && !plateaued(energies, window))) {
    if (done >= cap) {
      result.warnings.push_back("thermalization stopped at the sweep cap before the energy plateaued");
      break;
    }
    chain.sweep();
    energies.push_back(chain.energy_estimate());
    ++done;
  }
  result.thermalization_sweeps = done;
  if (done > 0) {
    const auto& c = chain.counters();
    const double rate = c.local_attempted ? static_cast<double>(c.local_accepted) / c.local_attempted : 0.0;
    if (rate < 1e-4) {
      throw QmcError("acceptance rate " + std::to_string(rate) +
                     " after thermalization; the Trotter step or parameters are pathological");
    }
  }

  const MoveCounters start = chain.counters();
  long sweep_index = 0;
  for (long i = 0; i < sampler.n_samples; ++i) {
    for (long s = 0; s < sampler.stride; ++s) {
      const MoveCounters before = chain.counters();
      chain.sweep();
      const MoveCounters& after = chain.counters();
      const long tried = after.local_attempted - before.local_attempted;
      const double acc = tried ? static_cast<double>(after.local_accepted - before.local_accepted) / tried : 0.0;
      result.trace.push_back({sweep_index++, chain.energy_estimate(), acc});
    }
    result.samples.push_back(chain.grid().slice_state(sampler.sample_slice));
    result.chain_ids.push_back(static_cast<int>(sampler.stream_id));
    result.sample_energies.push_back(result.trace.back().energy);
  }
  const MoveCounters& end = chain.counters();
  const long tried = end.local_attempted - start.local_attempted;
  result.acceptance_rate = tried ? static_cast<double>(end.local_accepted - start.local_accepted) / tried : 0.0;
  const long wtried = end.winding_attempted - start.winding_attempted;
  result.winding_acceptance_rate =
      wtried ? static_cast<double>(end.winding_accepted - start.winding_accepted) / wtried : 0.0;
  if (result.sample_energies.size() >= 2) {
    result.energy_autocorrelation = integrated_autocorrelation(result.sample_energies);
  }
  return result;
}

QmcRunResult run_chains(const LatticeConfig& config, const SamplerConfig& sampler, int chains) {
  if (chains < 1) throw ConfigError(ConfigErrorKind::Parameter, "need at least one chain");
  std::vector<QmcRunResult> parts(static_cast<std::size_t>(chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
  std::vector<std::thread> workers;
  for (int c = 0; c < chains; ++c) {
    workers.emplace_back([&, c] {
      try {
        SamplerConfig s = sampler;
        s.stream_id = sampler.stream_id + static_cast<std::uint64_t>(c);
        parts[static_cast<std::size_t>(c)] = run(config, s);
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  QmcRunResult merged = parts.front();
  double acc = merged.acceptance_rate, wacc = merged.winding_acceptance_rate;
  for (std::size_t c = 1; c < parts.size(); ++c) {
    auto& p = parts[c];
    merged.samples.insert(merged.samples.end(), p.samples.begin(), p.samples.end());
    merged.chain_ids.insert(merged.chain_ids.end(), p.chain_ids.begin(), p.chain_ids.end());
    merged.sample_energies.insert(merged.sample_energies.end(), p.sample_energies.begin(), p.sample_energies.end());
    merged.trace.insert(merged.trace.end(), p.trace.begin(), p.trace.end());
    merged.warnings.insert(merged.warnings.end(), p.warnings.begin(), p.warnings.end());
    merged.thermalization_sweeps = std::max(merged.thermalization_sweeps, p.thermalization_sweeps);
    merged.energy_autocorrelation = std::max(merged.energy_autocorrelation, p.energy_autocorrelation);
    acc += p.acceptance_rate;
    wacc += p.winding_acceptance_rate;
  }
  merged.acceptance_rate = acc / chains;
  merged.winding_acceptance_rate = wacc / chains;
  return merged;
}

Estimate binning_estimate(const std::vector<double>& series) {
  Estimate e;
  const std::size_t n = series.size();
  if (n == 0) return e;
  e.mean = mean_of(series, 0, n);
  if (n < 2) return e;
  e.variance = var_of(series, 0, n, e.mean);
  e.error = std::sqrt(e.variance / static_cast<double>(n));
  e.bin_levels = 1;
  std::vector<double> bins = series;
  while (bins.size() >= 128) {
    std::vector<double> next(bins.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = 0.5 * (bins[2 * i] + bins[2 * i + 1]);
    bins = std::move(next);
    const double m = mean_of(bins, 0, bins.size());
    const double err = std::sqrt(var_of(bins, 0, bins.size(), m) / static_cast<double>(bins.size()));
    ++e.bin_levels;
    // Keep the largest error seen so far; it stops growing once bins exceed
    // the correlation time.
    e.error = std::max(e.error, err);
  }
  return e;
}

double integrated_autocorrelation(const std::vector<double>& series) {
  if (series.size() < 2) return 0.0;
  const Estimate e = binning_estimate(series);
  const double naive = std::sqrt(e.variance / static_cast<double>(series.size()));
  if (!(naive > 0.0)) return 0.0;
  return 0.5 * (e.error / naive) * (e.error / naive);
}

std::vector<Estimate> estimate_observables(const QmcRunResult& result, const std::vector<Observable>& observables) {
  if (result.samples.size() < 2) throw std::invalid_argument("need at least two samples for error bars");
  std::vector<Estimate> out;
  out.reserve(observables.size());
  std::vector<double> series(result.samples.size());
  for (const auto& f : observables) {
    std::transform(result.samples.begin(), result.samples.end(), series.begin(), f);
    out.push_back(binning_estimate(series));
  }
  return out;
}

}  // namespace latsol::qmc
