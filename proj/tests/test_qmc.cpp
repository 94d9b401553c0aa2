#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "latsol/exact.hpp"
#include "latsol/qmc.hpp"
#include "trotter_oracle.hpp"

using namespace latsol;
using namespace latsol::qmc;

namespace {

SamplerConfig resolved(const LatticeConfig& c, SamplerConfig s) {
  resolve_sampler(c, s);
  return s;
}

Eigen::MatrixXd spectral_exponential(const Eigen::MatrixXd& h, double t) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  return es.eigenvectors() * (-t * es.eigenvalues().array()).exp().matrix().asDiagonal() * es.eigenvectors().transpose();
}

bool slices_conserve(const WorldlineGrid& g, long atoms) {
  for (int t = 0; t < g.slices(); ++t) {
    if (g.slice_total(t) != atoms) return false;
  }
  return true;
}

double thermal_energy(const LatticeConfig& c, double beta) {
  const auto s = exact::full_spectrum(exact::build_hamiltonian(exact::enumerate_basis(c)));
  const double e0 = s.eigenvalues(0);
  double z = 0.0, e = 0.0;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double w = std::exp(-beta * (s.eigenvalues(i) - e0));
    z += w;
    e += w * s.eigenvalues(i);
  }
  return e / z;
}

}  // namespace

TEST_CASE("bond hamiltonian examples") {
  const LatticeConfig c{4, 4, 1.0, -1.0};
  CHECK(bond_hamiltonian(c, 0).rows() == 1);
  CHECK(bond_hamiltonian(c, 0)(0, 0) == 0.0);
  const auto h1 = bond_hamiltonian({6, 3, 1.0, 0.7}, 1);
  CHECK(h1(0, 0) == 0.0);
  CHECK(h1(1, 1) == 0.0);
  CHECK(h1(0, 1) == doctest::Approx(-0.5));
  CHECK(h1(1, 0) == doctest::Approx(-0.5));
  const auto h2 = bond_hamiltonian(c, 2);
  CHECK(h2(0, 0) == doctest::Approx(-0.5));
  CHECK(h2(1, 1) == doctest::Approx(0.0));
  CHECK(h2(2, 2) == doctest::Approx(-0.5));
  CHECK(h2(0, 1) == doctest::Approx(-0.5 * std::sqrt(2.0)));
  CHECK(h2(1, 2) == doctest::Approx(-0.5 * std::sqrt(2.0)));
  CHECK(h2(0, 2) == 0.0);
}

TEST_CASE("bond hamiltonian equals a two-site exact hamiltonian with halved couplings") {
  for (int m : {1, 2, 5, 12}) {
    const LatticeConfig ring{8, 20, 1.3, -0.6};
    const auto h = bond_hamiltonian(ring, m);
    // Double-bond hopping -delta' with delta' = delta/2; interaction kappa'/2 with kappa' = kappa/2.
    const auto ex = exact::build_hamiltonian(exact::enumerate_basis({2, m, 0.65, -0.3})).dense();
    for (int a = 0; a <= m; ++a)
      for (int b = 0; b <= m; ++b) CHECK(h(a, b) == doctest::Approx(ex(m - a, m - b)).epsilon(1e-14).scale(1e-14));
  }
}

TEST_CASE("on two sites the bond hamiltonian is the whole hamiltonian") {
  const LatticeConfig c{2, 9, 1.0, -0.25};
  const auto h = bond_hamiltonian(c, 9);
  const auto ex = exact::build_hamiltonian(exact::enumerate_basis(c)).dense();
  for (int a = 0; a <= 9; ++a)
    for (int b = 0; b <= 9; ++b) CHECK(h(a, b) == doctest::Approx(ex(9 - a, 9 - b)).epsilon(1e-14).scale(1e-14));
}

TEST_CASE("single-atom propagator is cosh/sinh") {
  for (double dtau : {0.01, 0.3, 2.0}) {
    auto table = build_propagator_table({4, 4, 1.0, 0.0}, dtau);
    const auto g = table.block(1);
    CHECK(g(0, 0) == doctest::Approx(std::cosh(dtau / 2)).epsilon(1e-14));
    CHECK(g(1, 1) == doctest::Approx(std::cosh(dtau / 2)).epsilon(1e-14));
    CHECK(g(0, 1) == doctest::Approx(std::sinh(dtau / 2)).epsilon(1e-14));
    CHECK(g(1, 0) == doctest::Approx(std::sinh(dtau / 2)).epsilon(1e-14));
  }
}

TEST_CASE("propagators agree with a spectral exponential where it is accurate") {
  const LatticeConfig c{4, 12, 1.0, -0.5};
  auto table = build_propagator_table(c, 0.1);
  for (int m = 0; m <= 12; ++m) {
    const Eigen::MatrixXd ref = spectral_exponential(bond_hamiltonian(c, m), 0.1);
    const Eigen::MatrixXd g = table.block(m);
    CHECK((g - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("propagators are positive, symmetric and tend to the identity") {
  for (const LatticeConfig c : {LatticeConfig{16, 256, 1.0, -0.004}, LatticeConfig{4, 40, 1.0, 0.3},
                                LatticeConfig{2, 64, 1.0, -2.309 / 64}}) {
    auto table = build_propagator_table(c, 0.05);
    for (int m : {0, 1, 2, 7, 30, c.atoms}) {
      bool positive = true, symmetric = true;
      for (int a = 0; a <= m; ++a) {
        for (int b = 0; b <= m; ++b) {
          const double lw = table.log_weight(m, a, b);
          positive = positive && lw > -std::numeric_limits<double>::infinity();
          symmetric = symmetric && std::abs(lw - table.log_weight(m, b, a)) <= 1e-12 * std::max(1.0, std::abs(lw));
        }
      }
      CHECK(positive);
      CHECK(symmetric);
    }
  }
  auto tiny = build_propagator_table({4, 6, 1.0, -0.5}, 1e-7);
  for (int m = 0; m <= 6; ++m) {
    const Eigen::MatrixXd g = tiny.block(m);
    CHECK((g - Eigen::MatrixXd::Identity(m + 1, m + 1)).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("sampler configuration checks") {
  SamplerConfig s;
  s.beta = 20.0;
  CHECK_THROWS_AS(resolve_sampler({3, 4, 1.0, 0.0}, s), ConfigError);
  SamplerConfig ok;
  ok.beta = 20.0;
  CHECK(resolve_sampler({4, 4, 1.0, -0.5}, ok).size() == 1);  // 0.05 * 2 is above the soft threshold
  CHECK(ok.n_beta == 400);
  SamplerConfig quiet;
  quiet.beta = 1.0;
  quiet.n_beta = 100;
  CHECK(resolve_sampler({4, 4, 1.0, -0.5}, quiet).empty());
  SamplerConfig fig2;
  fig2.beta = 100.0;
  const auto warn = resolve_sampler({16, 256, 1.0, -0.004}, fig2);
  CHECK(fig2.n_beta == 2000);
  CHECK(warn.size() == 1);  // 0.05 * 1.024 sits just above the soft threshold
  SamplerConfig coarse;
  coarse.beta = 10.0;
  coarse.n_beta = 5;
  CHECK_THROWS_AS(resolve_sampler({4, 4, 1.0, -0.5}, coarse), ConfigError);
  coarse.allow_coarse_trotter = true;
  CHECK(resolve_sampler({4, 4, 1.0, -0.5}, coarse).size() == 1);
  SamplerConfig narrow;
  narrow.seeding = {SeedingKind::Narrow, 16, 2.0};
  CHECK_THROWS_AS(resolve_sampler({16, 16, 1.0, 0.0}, narrow), ConfigError);
  narrow.seeding = {SeedingKind::Narrow, 3, 0.0};
  CHECK_THROWS_AS(resolve_sampler({16, 16, 1.0, 0.0}, narrow), ConfigError);
}

TEST_CASE("seeding") {
  CHECK(seed_state({4, 4, 1.0, 0.0}, {}) == NumberState({1, 1, 1, 1}));
  CHECK(seed_state({3, 4, 1.0, 0.0}, {}) == NumberState({2, 1, 1}));
  const auto bump = seed_state({16, 256, 1.0, -0.004}, {SeedingKind::Narrow, 8, 2.0});
  CHECK(bump.total() == 256);
  int inside = 0;
  for (int k = 5; k <= 11; ++k) inside += bump[k];
  CHECK(inside >= 230);
  CHECK(bump[0] == 0);
  CHECK(std::max_element(bump.occupations().begin(), bump.occupations().end()) - bump.occupations().begin() == 8);
  SamplerConfig s;
  s.beta = 1.0;
  s.n_beta = 7;
  s.seeding = {SeedingKind::Narrow, 2, 1.0};
  const auto g = seed_grid({6, 30, 1.0, 0.0}, s);
  CHECK(g.slices() == 14);
  for (int t = 0; t < 14; ++t) CHECK(g.slice_state(t) == g.slice_state(0));
  CHECK_THROWS_AS(seed_state({6, 30, 1.0, 0.0}, {SeedingKind::Narrow, 2, -1.0}), ConfigError);
}

TEST_CASE("grid dump round trip") {
  WorldlineGrid g(3, 4);
  for (int t = 0; t < 4; ++t)
    for (int k = 0; k < 3; ++k) g.at(t, k) = t * 3 + k;
  std::stringstream ss;
  g.write(ss);
  CHECK(ss.str().rfind("3 4\n", 0) == 0);
  CHECK(WorldlineGrid::read(ss) == g);
  std::istringstream bad("3 2\n1 2 3\n");
  CHECK_THROWS(WorldlineGrid::read(bad));
}

TEST_CASE("moves that would empty a site are rejected") {
  const LatticeConfig c{4, 1, 1.0, 0.0};
  SamplerConfig s = resolved(c, {.beta = 1.0, .n_beta = 10});
  WorldlineSampler w(c, s);
  const WorldlineGrid before = w.grid();
  for (int slice = 0; slice < 20; ++slice) CHECK_FALSE(w.local_move(2, slice, +1));
  CHECK(w.grid() == before);
}

TEST_CASE("metropolis acceptance equals min(1, W'/W) from full-grid weights") {
  const LatticeConfig c{4, 4, 1.0, -0.5};
  SamplerConfig s = resolved(c, {.beta = 2.0, .n_beta = 20, .seed = 3, .allow_coarse_trotter = true});
  WorldlineSampler w(c, s);
  for (int i = 0; i < 50; ++i) w.sweep();
  const WorldlineGrid start = w.grid();
  int tested = 0;
  for (int site = 0; site < 4 && tested < 3; ++site) {
    for (int slice = 0; slice < 40 && tested < 3; ++slice) {
      w.set_grid(start);
      const double before = w.log_weight();
      // Force the candidate through once to read off its full-grid weight.
      int accepted = 0;
      WorldlineGrid moved = start;
      bool found = false;
      for (int trial = 0; trial < 200 && !found; ++trial) {
        w.set_grid(start);
        if (w.local_move(site, slice, +1)) {
          moved = w.grid();
          found = true;
        }
      }
      if (!found) continue;
      w.set_grid(moved);
      const double after = w.log_weight();
      const double p = std::min(1.0, std::exp(after - before));
      if (p > 0.97 || p < 0.05) continue;
      const int trials = 20000;
      for (int trial = 0; trial < trials; ++trial) {
        w.set_grid(start);
        accepted += w.local_move(site, slice, +1);
      }
      const double rate = static_cast<double>(accepted) / trials;
      CHECK(std::abs(rate - p) <= 4.0 * std::sqrt(p * (1 - p) / trials));
      // The reverse move then has ratio 1/p > 1 and is always accepted.
      for (int trial = 0; trial < 200; ++trial) {
        w.set_grid(moved);
        const int to = (site + 1) % 4;
        CHECK(w.local_move(to, slice, -1));
      }
      ++tested;
    }
  }
  CHECK(tested == 3);
}

TEST_CASE("every slice keeps N atoms after every attempted move and weights stay finite") {
  for (const LatticeConfig c : {LatticeConfig{4, 5, 1.0, -0.5}, LatticeConfig{2, 6, 1.0, -0.3}, LatticeConfig{6, 9, 1.0, 0.4}}) {
    SamplerConfig s = resolved(c, {.beta = 2.0, .n_beta = 12, .allow_coarse_trotter = true});
    WorldlineSampler w(c, s);
    bool conserved = true, finite = true;
    for (int i = 0; i < 20000; ++i) {
      w.random_local_move();
      conserved = conserved && slices_conserve(w.grid(), c.atoms);
      if (c.sites >= 4 && i % 7 == 0) {
        w.random_winding_move();
        conserved = conserved && slices_conserve(w.grid(), c.atoms);
      }
      if (i % 101 == 0) finite = finite && std::isfinite(w.log_weight());
    }
    CHECK(conserved);
    CHECK(finite);
    CHECK(w.counters().local_accepted > 0);
  }
}

TEST_CASE("winding move and its reverse restore the grid") {
  const LatticeConfig c{4, 4, 1.0, -0.5};
  SamplerConfig s = resolved(c, {.beta = 10.0, .n_beta = 5, .allow_coarse_trotter = true});
  WorldlineSampler w(c, s);
  const WorldlineGrid start = w.grid();
  const double w0 = w.log_weight();
  int done = 0;
  for (int attempt = 0; attempt < 2000 && done < 5; ++attempt) {
    w.set_grid(start);
    if (!w.winding_move(1, 1, +1, +1)) continue;
    CHECK(w.grid() != start);
    CHECK(slices_conserve(w.grid(), 4));
    CHECK(std::isfinite(w.log_weight()));
    // The atom's world line now winds once: site occupations differ along the staircase.
    for (int r = 1; r < 4; ++r) CHECK(w.grid().at(1 + r, 1) == 0);
    int back = 0;
    while (!w.winding_move(1, 1, +1, -1)) ++back;
    CHECK(w.grid() == start);
    CHECK(w.log_weight() == doctest::Approx(w0).epsilon(1e-14));
    ++done;
  }
  CHECK(done == 5);
  CHECK_THROWS_AS(w.winding_move(1, 0, +1, +1), std::invalid_argument);
}

TEST_CASE("symmetry moves leave the weight unchanged") {
  const LatticeConfig c{6, 7, 1.0, -0.4};
  SamplerConfig s = resolved(c, {.beta = 2.0, .n_beta = 15, .allow_coarse_trotter = true});
  WorldlineSampler w(c, s);
  for (int i = 0; i < 30; ++i) w.sweep();
  const double lw = w.log_weight();
  const WorldlineGrid g = w.grid();
  for (auto [r, t] : std::vector<std::pair<int, int>>{{1, 1}, {2, 0}, {0, 4}, {5, 11}, {3, -3}}) {
    w.set_grid(g);
    w.symmetry_move(r, t);
    CHECK(w.log_weight() == doctest::Approx(lw).epsilon(1e-12));
    CHECK(w.grid().at(t + 3, r + 2) == g.at(3, 2));
  }
  CHECK_THROWS_AS(w.symmetry_move(1, 0), std::invalid_argument);
}

TEST_CASE("identical sampler settings reproduce the sample sequence") {
  const LatticeConfig c{4, 4, 1.0, -0.5};
  SamplerConfig s{.beta = 2.0, .n_beta = 40, .thermalization_sweeps = 50, .stride = 2, .n_samples = 50, .seed = 77};
  const auto a = run(c, s);
  const auto b = run(c, s);
  CHECK(a.samples == b.samples);
  CHECK(a.sample_energies == b.sample_energies);
  s.stream_id = 1;
  CHECK(run(c, s).samples != a.samples);
  const auto chains = run_chains(c, s, 3);
  REQUIRE(chains.samples.size() == 150);
  CHECK(chains.chain_ids.front() == 1);
  CHECK(chains.chain_ids.back() == 3);
  const auto single = run(c, s);
  CHECK(std::equal(single.samples.begin(), single.samples.end(), chains.samples.begin()));
}

TEST_CASE("two sites, one free atom: site 0 is occupied half the time") {
  const LatticeConfig c{2, 1, 1.0, 0.0};
  const auto basis = exact::enumerate_basis(c);
  const auto p = exact::thermal_distribution(exact::build_hamiltonian(basis), basis, 4.0).two_site_marginal();
  REQUIRE(p[1] == doctest::Approx(0.5).epsilon(1e-12));
  const auto r = run(c, {.beta = 4.0, .n_beta = 8, .thermalization_sweeps = 200, .stride = 2, .n_samples = 20000, .seed = 5, .allow_coarse_trotter = true});
  const auto est = estimate_observables(r, {[](const NumberState& n) { return static_cast<double>(n[0]); }});
  CHECK(std::abs(est[0].mean - p[1]) <= 4.0 * est[0].error);
}

TEST_CASE("two-site sampler matches the exact thermal distribution") {
  // For L = 2 each half-step applies exp(-dtau/2 H) exactly, so there is no Trotter error.
  const LatticeConfig c{2, 6, 1.0, -0.4};
  const auto basis = exact::enumerate_basis(c);
  const auto p = exact::thermal_distribution(exact::build_hamiltonian(basis), basis, 3.0).two_site_marginal();
  const auto r = run(c, {.beta = 3.0, .n_beta = 3, .thermalization_sweeps = 200, .stride = 3, .n_samples = 20000,
                         .seed = 9, .allow_coarse_trotter = true});
  for (int n = 0; n <= 6; ++n) {
    const auto est = estimate_observables(r, {[n](const NumberState& s) { return s[0] == n ? 1.0 : 0.0; }});
    CHECK(std::abs(est[0].mean - p[static_cast<std::size_t>(n)]) <= 4.0 * std::max(est[0].error, 1e-3));
  }
}

TEST_CASE("checkerboard ensemble matches the transfer-matrix oracle") {
  const LatticeConfig c{4, 4, 1.0, -0.5};
  const auto basis = exact::enumerate_basis(c);
  for (int n_beta : {5, 10}) {
    const auto p = oracle::trotter_distribution(basis, 10.0, n_beta);
    const double ref = oracle::average(basis, p, [](std::span<const int> n) { return static_cast<double>(n[0] * n[1]); });
    SamplerConfig s = resolved(c, {.beta = 10.0, .n_beta = n_beta, .seed = 21, .allow_coarse_trotter = true});
    WorldlineSampler w(c, s);
    for (int i = 0; i < 2000; ++i) w.sweep();
    std::vector<double> series;
    for (int i = 0; i < 60000; ++i) {
      w.sweep();
      double acc = 0.0;
      const auto& g = w.grid();
      for (int t = 0; t < g.slices(); ++t)
        for (int k = 0; k < 4; ++k) acc += g.at(t, k) * g.at(t, k + 1);
      series.push_back(acc / (4.0 * g.slices()));
    }
    const auto est = binning_estimate(series);
    CHECK(std::abs(est.mean - ref) <= 4.0 * est.error);
  }
}

TEST_CASE("energy estimator converges to the exact thermal energy") {
  const LatticeConfig c{4, 4, 1.0, -0.5};
  const double exact_e = thermal_energy(c, 2.0);
  SamplerConfig s = resolved(c, {.beta = 2.0, .n_beta = 80, .seed = 4});
  WorldlineSampler w(c, s);
  for (int i = 0; i < 1000; ++i) w.sweep();
  std::vector<double> e;
  for (int i = 0; i < 20000; ++i) {
    w.sweep();
    e.push_back(w.energy_estimate());
  }
  const auto est = binning_estimate(e);
  // Trotter bias at dtau = 0.025 is a few 1e-4 here.
  CHECK(std::abs(est.mean - exact_e) <= 4.0 * est.error + 2e-3);
}

TEST_CASE("non-interacting occupations are uniform") {
  const LatticeConfig c{6, 5, 1.0, 0.0};
  const auto r = run(c, {.beta = 3.0, .thermalization_sweeps = 200, .stride = 2, .n_samples = 4000, .seed = 8});
  std::vector<Observable> fs;
  for (int k = 0; k < 6; ++k) fs.push_back([k](const NumberState& n) { return static_cast<double>(n[k]); });
  fs.push_back([](const NumberState& n) { return static_cast<double>(n.total()); });
  const auto est = estimate_observables(r, fs);
  for (int k = 0; k < 6; ++k) CHECK(std::abs(est[static_cast<std::size_t>(k)].mean - 5.0 / 6.0) <= 3.5 * est[static_cast<std::size_t>(k)].error);
  CHECK(est[6].mean == 5.0);
  CHECK(est[6].variance == 0.0);
  CHECK(est[6].error == 0.0);
}

TEST_CASE("error bars shrink like 1/sqrt(M)") {
  const LatticeConfig c{4, 4, 1.0, -0.5};
  SamplerConfig s{.beta = 2.0, .n_beta = 10, .thermalization_sweeps = 300, .stride = 4, .n_samples = 10000, .seed = 12,
                  .allow_coarse_trotter = true};
  const auto r = run(c, s);
  auto f = [](const NumberState& n) { return static_cast<double>(n[0] * n[1]); };
  std::vector<double> errs;
  for (std::size_t m : {100u, 1000u, 10000u}) {
    std::vector<double> series;
    for (std::size_t i = 0; i < m; ++i) series.push_back(f(r.samples[i]));
    errs.push_back(binning_estimate(series).error);
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(std::sqrt(10.0)).epsilon(0.35));
  CHECK(errs[1] / errs[2] == doctest::Approx(std::sqrt(10.0)).epsilon(0.35));
}

TEST_CASE("binning recovers the autocorrelation of an AR(1) series") {
  RngStream rng(31, 0);
  for (double rho : {0.0, 0.8}) {
    std::vector<double> x(1 << 18);
    double v = 0.0;
    for (auto& xi : x) xi = v = rho * v + std::sqrt(1 - rho * rho) * rng.normal();
    const double tau = (1 + rho) / (2 * (1 - rho));
    CHECK(integrated_autocorrelation(x) == doctest::Approx(tau).epsilon(0.25));
    const auto e = binning_estimate(x);
    CHECK(std::abs(e.mean) <= 4.0 * std::sqrt(2 * tau / x.size()));
  }
}

TEST_CASE("runs report diagnostics") {
  const LatticeConfig c{4, 4, 1.0, -0.5};
  const auto r = run(c, {.beta = 2.0, .n_beta = 40, .thermalization_sweeps = 100, .stride = 3, .n_samples = 40});
  CHECK(r.samples.size() == 40);
  CHECK(r.trace.size() == 120);
  CHECK(r.thermalization_sweeps >= 100);
  CHECK(r.acceptance_rate > 1e-3);
  CHECK(r.n_beta == 40);
  CHECK(r.dtau == doctest::Approx(0.05));
  for (const auto& n : r.samples) CHECK(n.total() == 4);
}
