#include "latsol/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace latsol::exact {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return (a > kSaturated - b) ? kSaturated : a + b;
}

// table[s][r] = number of ways to place r atoms on s sites.
std::vector<std::vector<std::uint64_t>> composition_table(int sites, int atoms) {
  std::vector<std::vector<std::uint64_t>> t(static_cast<std::size_t>(sites) + 1,
                                            std::vector<std::uint64_t>(static_cast<std::size_t>(atoms) + 1, 0));
  t[0][0] = 1;
  for (int s = 1; s <= sites; ++s) {
    std::uint64_t running = 0;
    for (int r = 0; r <= atoms; ++r) {
      running = saturating_add(running, t[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(r)]);
      t[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)] = running;
    }
  }
  return t;
}

}  // namespace

std::uint64_t basis_dimension(int sites, int atoms) {
  if (sites < 1 || atoms < 0) return 0;
  return composition_table(sites, atoms)[static_cast<std::size_t>(sites)][static_cast<std::size_t>(atoms)];
}

FockBasis::FockBasis(const LatticeConfig& config) : config_(validate(config)) {
  const int L = config.sites;
  const int N = config.atoms;
  count_ = composition_table(L, N);
  const std::uint64_t dim = count_[static_cast<std::size_t>(L)][static_cast<std::size_t>(N)];
  if (dim > kMaxBasisDimension) {
    throw std::length_error("Fock basis dimension exceeds the budget of " +
                            std::to_string(kMaxBasisDimension) + " states");
  }
  dim_ = static_cast<std::size_t>(dim);
  flat_.reserve(dim_ * static_cast<std::size_t>(L));

  // Odometer over descending lexicographic order; the last site takes the rest.
  std::vector<int> n(static_cast<std::size_t>(L), 0);
  n[0] = N;
  while (true) {
    flat_.insert(flat_.end(), n.begin(), n.end());
    // Find the rightmost site before the last one that can give an atom away.
    int k = L - 2;
    while (k >= 0 && n[static_cast<std::size_t>(k)] == 0) --k;
    if (k < 0) break;
    --n[static_cast<std::size_t>(k)];
    int rest = 0;
    for (int j = k + 1; j < L; ++j) {
      rest += n[static_cast<std::size_t>(j)];
      n[static_cast<std::size_t>(j)] = 0;
    }
    n[static_cast<std::size_t>(k + 1)] = rest + 1;
  }
  if (flat_.size() != dim_ * static_cast<std::size_t>(L)) {
    throw std::logic_error("Fock basis enumeration count mismatch");
  }
}

std::uint64_t FockBasis::compositions(int sites, int atoms) const {
  if (atoms < 0) return 0;
  return count_[static_cast<std::size_t>(sites)][static_cast<std::size_t>(atoms)];
}

NumberState FockBasis::state(std::size_t i) const {
  const auto occ = occupations(i);
  return NumberState(std::vector<int>(occ.begin(), occ.end()));
}

std::size_t FockBasis::index(std::span<const int> n) const {
  const int L = config_.sites;
  if (static_cast<int>(n.size()) != L) throw std::invalid_argument("number state has wrong length");
  long remaining = config_.atoms;
  std::uint64_t idx = 0;
  for (int k = 0; k < L - 1; ++k) {
    const int nk = n[static_cast<std::size_t>(k)];
    if (nk < 0 || nk > remaining) throw std::invalid_argument("number state is not in this basis");
    // States ahead of this one hold more than nk atoms at site k.
    if (remaining - nk >= 1) idx += compositions(L - k, static_cast<int>(remaining - nk - 1));
    remaining -= nk;
  }
  if (n[static_cast<std::size_t>(L - 1)] != remaining) {
    throw std::invalid_argument("number state does not hold the basis atom number");
  }
  return static_cast<std::size_t>(idx);
}

FockBasis enumerate_basis(const LatticeConfig& config) { return FockBasis(config); }

HamiltonianMatrix::HamiltonianMatrix(LatticeConfig config, std::vector<double> diagonal,
                                     std::vector<std::size_t> row_start, std::vector<std::size_t> cols,
                                     std::vector<double> values)
    : config_(config),
      diagonal_(std::move(diagonal)),
      row_start_(std::move(row_start)),
      cols_(std::move(cols)),
      values_(std::move(values)) {}

std::vector<HamiltonianMatrix::Entry> HamiltonianMatrix::off_diagonal_entries() const {
  std::vector<Entry> out;
  out.reserve(values_.size());
  for (std::size_t i = 0; i < dimension(); ++i) {
    for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) out.push_back({i, cols_[p], values_[p]});
  }
  return out;
}

double HamiltonianMatrix::at(std::size_t i, std::size_t j) const {
  if (i == j) return diagonal_[i];
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_start_[i]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_start_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? values_[static_cast<std::size_t>(it - cols_.begin())] : 0.0;
}

void HamiltonianMatrix::multiply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t i = 0; i < dimension(); ++i) {
    double s = diagonal_[i] * in[i];
    for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) s += values_[p] * in[cols_[p]];
    out[i] = s;
  }
}

Eigen::MatrixXd HamiltonianMatrix::dense() const {
  const auto D = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(D, D);
  for (std::size_t i = 0; i < dimension(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diagonal_[i];
    for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols_[p])) = values_[p];
    }
  }
  return m;
}

double HamiltonianMatrix::norm_bound() const {
  double bound = 0.0;
  for (std::size_t i = 0; i < dimension(); ++i) {
    double s = std::abs(diagonal_[i]);
    for (std::size_t p = row_start_[i]; p < row_start_[i + 1]; ++p) s += std::abs(values_[p]);
    bound = std::max(bound, s);
  }
  return bound;
}

HamiltonianMatrix build_hamiltonian(const FockBasis& basis) {
  const auto& config = basis.config();
  const int L = config.sites;
  const std::size_t D = basis.size();
  std::vector<double> diagonal(D);
  std::vector<std::size_t> row_start(D + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> values;
  cols.reserve(D * static_cast<std::size_t>(2 * L));
  values.reserve(D * static_cast<std::size_t>(2 * L));

  std::vector<int> target(static_cast<std::size_t>(L));
  std::vector<std::pair<std::size_t, double>> row;
  for (std::size_t i = 0; i < D; ++i) {
    const auto n = basis.occupations(i);
    long pairs = 0;
    for (int k = 0; k < L; ++k) {
      const long nk = n[static_cast<std::size_t>(k)];
      pairs += nk * (nk - 1);
    }
    diagonal[i] = 0.5 * config.kappa * static_cast<double>(pairs);

    // Directed hops k -> k+1 and k -> k-1, each with amplitude -delta/2.
    // On two sites both land on the same neighbour and add up to -delta.
    row.clear();
    for (int k = 0; k < L; ++k) {
      const long nk = n[static_cast<std::size_t>(k)];
      if (nk == 0) continue;
      for (int dir : {+1, -1}) {
        const int j = wrap_site(k + dir, L);
        const long nj = n[static_cast<std::size_t>(j)];
        std::copy(n.begin(), n.end(), target.begin());
        --target[static_cast<std::size_t>(k)];
        ++target[static_cast<std::size_t>(j)];
        const std::int64_t product = nk * (nj + 1);
        row.emplace_back(basis.index(target), -0.5 * config.delta * std::sqrt(static_cast<double>(product)));
      }
    }
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t p = 0; p < row.size();) {
      std::size_t q = p;
      double v = 0.0;
      while (q < row.size() && row[q].first == row[p].first) v += row[q++].second;
      cols.push_back(row[p].first);
      values.push_back(v);
      p = q;
    }
    row_start[i + 1] = cols.size();
  }
  return HamiltonianMatrix(config, std::move(diagonal), std::move(row_start), std::move(cols), std::move(values));
}

namespace {

int count_degenerate(const Eigen::VectorXd& evals, double tol, const LatticeConfig& config) {
  const double window = tol * energy_scale(config);
  int g = 0;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals(i) - evals(0) <= window) ++g;
  }
  return g;
}

SpectralResult dense_lowest(const HamiltonianMatrix& h, int count, double degeneracy_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.dense());
  if (solver.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  const Eigen::Index k = std::min<Eigen::Index>(count, solver.eigenvalues().size());
  SpectralResult r;
  r.eigenvalues = solver.eigenvalues().head(k);
  r.eigenvectors = solver.eigenvectors().leftCols(k);
  r.degeneracy_tol = degeneracy_tol;
  r.degenerate_count = count_degenerate(r.eigenvalues, degeneracy_tol, h.config());
  return r;
}

void orthogonalize(Eigen::VectorXd& w, const Eigen::MatrixXd& against, Eigen::Index columns) {
  // Two passes of classical Gram-Schmidt.
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index c = 0; c < columns; ++c) w -= against.col(c).dot(w) * against.col(c);
  }
}

// Lowest eigenpair of h restricted to the complement of `locked`.
std::pair<double, Eigen::VectorXd> lanczos_lowest(const HamiltonianMatrix& h, const Eigen::MatrixXd& locked,
                                                  Eigen::Index n_locked, Eigen::VectorXd start, double tol) {
  const auto D = static_cast<Eigen::Index>(h.dimension());
  const Eigen::Index krylov_max = std::min<Eigen::Index>(D - n_locked, 240);
  if (krylov_max < 1) throw std::runtime_error("no room left for another eigenvector");
  Eigen::VectorXd w(D);
  Eigen::VectorXd hv(D);

  for (int restart = 0; restart < 200; ++restart) {
    Eigen::MatrixXd V(D, krylov_max);
    std::vector<double> alpha, beta;
    orthogonalize(start, locked, n_locked);
    start.normalize();
    V.col(0) = start;
    Eigen::Index m = 0;
    for (Eigen::Index j = 0; j < krylov_max; ++j) {
      h.multiply({V.col(j).data(), static_cast<std::size_t>(D)}, {hv.data(), static_cast<std::size_t>(D)});
      alpha.push_back(V.col(j).dot(hv));
      w = hv - alpha.back() * V.col(j);
      if (j > 0) w -= beta.back() * V.col(j - 1);
      orthogonalize(w, V, j + 1);
      orthogonalize(w, locked, n_locked);
      m = j + 1;
      const double b = w.norm();
      if (j + 1 == krylov_max || b < 1e-14 * h.norm_bound()) break;
      beta.push_back(b);
      V.col(j + 1) = w / b;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T);
    Eigen::VectorXd y = V.leftCols(m) * small.eigenvectors().col(0);
    orthogonalize(y, locked, n_locked);
    y.normalize();
    h.multiply({y.data(), static_cast<std::size_t>(D)}, {hv.data(), static_cast<std::size_t>(D)});
    const double energy = y.dot(hv);
    const double residual = (hv - energy * y).norm();
    if (residual <= tol) return {energy, y};
    start = y;
  }
  throw std::runtime_error("Lanczos eigensolver did not converge");
}

}  // namespace

SpectralResult lanczos_ground_states(const HamiltonianMatrix& h, int count, double degeneracy_tol) {
  if (count < 1) throw std::invalid_argument("need at least one eigenpair");
  const auto D = static_cast<Eigen::Index>(h.dimension());
  const Eigen::Index k = std::min<Eigen::Index>(count, D);
  const double tol = 1e-10 * std::max(h.norm_bound(), 1e-300);

  Eigen::MatrixXd vecs = Eigen::MatrixXd::Zero(D, k);
  Eigen::VectorXd vals(k);
  RngStream rng(0x5eedULL, 0);
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::VectorXd start(D);
    for (Eigen::Index i = 0; i < D; ++i) start(i) = rng.uniform() - 0.5;
    auto [e, v] = lanczos_lowest(h, vecs, c, start, tol);
    vals(c) = e;
    vecs.col(c) = v;
  }
  // Deflation finds pairs in ascending order up to solver tolerance; sort to be safe.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals(a) < vals(b); });
  SpectralResult r;
  r.eigenvalues.resize(k);
  r.eigenvectors.resize(D, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    r.eigenvalues(c) = vals(order[static_cast<std::size_t>(c)]);
    r.eigenvectors.col(c) = vecs.col(order[static_cast<std::size_t>(c)]);
  }
  r.degeneracy_tol = degeneracy_tol;
  r.degenerate_count = count_degenerate(r.eigenvalues, degeneracy_tol, h.config());
  return r;
}

SpectralResult ground_states(const HamiltonianMatrix& h, int count, double degeneracy_tol) {
  if (count < 1) throw std::invalid_argument("need at least one eigenpair");
  if (h.dimension() <= static_cast<std::size_t>(kDenseLimit)) return dense_lowest(h, count, degeneracy_tol);
  return lanczos_ground_states(h, count, degeneracy_tol);
}

SpectralResult full_spectrum(const HamiltonianMatrix& h, double degeneracy_tol) {
  if (h.dimension() > static_cast<std::size_t>(kDenseLimit)) {
    throw std::length_error("full spectrum limited to dimension " + std::to_string(kDenseLimit));
  }
  return dense_lowest(h, static_cast<int>(h.dimension()), degeneracy_tol);
}

std::vector<double> NumberDistribution::two_site_marginal() const {
  if (basis.config().sites != 2) throw std::logic_error("two-site marginal needs a two-site lattice");
  const int N = basis.config().atoms;
  std::vector<double> p(static_cast<std::size_t>(N) + 1, 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) p[static_cast<std::size_t>(basis.occupations(i)[0])] += probabilities[i];
  return p;
}

NumberDistribution mixture_distribution(const SpectralResult& spectral, const FockBasis& basis, int count) {
  if (count < 1) throw std::invalid_argument("mixture needs at least one state");
  if (count > spectral.eigenvectors.cols()) throw std::invalid_argument("mixture asks for more states than computed");
  if (static_cast<std::size_t>(spectral.eigenvectors.rows()) != basis.size()) {
    throw std::invalid_argument("eigenvectors do not match the basis");
  }
  NumberDistribution d{basis, std::vector<double>(basis.size(), 0.0), DistributionSource::ZeroTemperatureMixture, 0.0};
  for (int a = 0; a < count; ++a) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double c = spectral.eigenvectors(static_cast<Eigen::Index>(i), a);
      d.probabilities[i] += c * c / count;
    }
  }
  return d;
}

NumberDistribution zero_temp_distribution(const SpectralResult& spectral, const FockBasis& basis) {
  if (spectral.degenerate_count < 1) throw std::invalid_argument("no ground state flagged for the mixture");
  return mixture_distribution(spectral, basis, spectral.degenerate_count);
}

NumberDistribution thermal_distribution(const HamiltonianMatrix& h, const FockBasis& basis, double beta) {
  if (beta < 0.0) throw std::invalid_argument("inverse temperature must be nonnegative");
  const auto spectrum = full_spectrum(h);
  const auto& E = spectrum.eigenvalues;
  const auto& V = spectrum.eigenvectors;
  NumberDistribution d{basis, std::vector<double>(basis.size(), 0.0), DistributionSource::Thermal, beta};
  double z = 0.0;
  for (Eigen::Index j = 0; j < E.size(); ++j) {
    const double w = std::exp(-beta * (E(j) - E(0)));
    if (w == 0.0) continue;
    z += w;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double c = V(static_cast<Eigen::Index>(i), j);
      d.probabilities[i] += w * c * c;
    }
  }
  // Columns are orthonormal, so sum_i P_i = z before this division.
  for (auto& p : d.probabilities) p /= z;
  return d;
}

double expectation(const std::function<double(std::span<const int>)>& f, const NumberDistribution& dist) {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.basis.size(); ++i) s += dist.probabilities[i] * f(dist.basis.occupations(i));
  return s;
}

std::vector<TwoSiteCurve> two_site_scan(std::span<const int> atom_numbers, double lambda, double delta) {
  std::vector<TwoSiteCurve> curves;
  curves.reserve(atom_numbers.size());
  for (const int N : atom_numbers) {
    const LatticeConfig config{2, N, delta, lambda * delta / N};
    const FockBasis basis(config);
    const auto h = build_hamiltonian(basis);
    const int count = std::min<int>(2, static_cast<int>(basis.size()));
    const auto spectral = ground_states(h, count);
    const auto dist = mixture_distribution(spectral, basis, count);
    TwoSiteCurve curve;
    curve.atoms = N;
    curve.kappa = config.kappa;
    curve.probabilities = dist.two_site_marginal();
    curve.splitting = count > 1 ? spectral.eigenvalues(1) - spectral.eigenvalues(0) : 0.0;
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace latsol::exact
