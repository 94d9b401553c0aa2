#include <fmt/chrono.h>
#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <json.hpp>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "latsol/analysis.hpp"
#include "latsol/cli.hpp"
#include "latsol/dnlse.hpp"
#include "latsol/exact.hpp"
#include "latsol/qmc.hpp"

namespace latsol::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string now_utc() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                     std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

std::string to_text(double x) { return format_real(x); }
std::string to_text(bool x) { return x ? "true" : "false"; }
std::string to_text(const std::string& x) { return x; }
template <class T>
  requires std::is_integral_v<T>
std::string to_text(T x) {
  return std::to_string(x);
}
template <class T>
std::string to_text(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_text(v[i]);
  return s;
}

// The options of one subcommand, with a way to print each resolved value.
struct Command {
  CLI::App* app = nullptr;
  std::vector<std::pair<std::string, std::function<std::string()>>> params;

  template <class T>
  CLI::Option* option(const std::string& name, T& var, const std::string& help) {
    params.emplace_back(name, [&var] { return to_text(var); });
    return app->add_option("--" + name, var, help);
  }
  CLI::Option* flag(const std::string& name, bool& var, const std::string& help) {
    params.emplace_back(name, [&var] { return to_text(var); });
    return app->add_flag("--" + name + ",!--no-" + name, var, help);
  }
  bool knows(const std::string& name) const {
    return std::any_of(params.begin(), params.end(), [&](const auto& p) { return p.first == name; });
  }
};

struct Output {
  fs::path dir;
  std::vector<std::string> files;

  fs::path file(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
};

struct Lattice {
  int sites = 2, atoms = 1;
  double delta = 1.0, kappa = 0.0;

  void add(Command& c) {
    c.option("sites", sites, "lattice sites L");
    c.option("atoms", atoms, "atom number N");
    c.option("delta", delta, "tunneling amplitude");
    c.option("kappa", kappa, "on-site interaction");
  }
  LatticeConfig config() const { return validate({sites, atoms, delta, kappa}); }
};

std::vector<std::string> occupation_columns(int sites) {
  std::vector<std::string> h;
  for (int k = 0; k < sites; ++k) h.push_back("n_" + std::to_string(k));
  return h;
}

void append_occupations(std::vector<std::string>& row, std::span<const int> n) {
  for (int x : n) row.push_back(std::to_string(x));
}

double parse_real(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw std::runtime_error("not a number: " + s);
  return v;
}

struct ClassicalCommand {
  Lattice lattice{16, 256, 1.0, -0.004};
  int center = -1;
  double width = 2.0, dtau = 0.0, tol = 1e-12, residual_tol = 1e-11;
  long max_iter = 10'000'000;

  void add(Command& c) {
    lattice.add(c);
    c.option("center", center, "seed centre site (-1: L/2)");
    c.option("width", width, "seed Gaussian width")->check(CLI::PositiveNumber);
    c.option("dtau", dtau, "imaginary-time step (0: automatic)");
    c.option("tol", tol, "relative energy change per unit imaginary time");
    c.option("residual-tol", residual_tol, "stationarity residual tolerance");
    c.option("max-iter", max_iter, "iteration cap");
  }

  int execute(Output& o, json&, std::ostream& out, std::ostream& err) {
    const auto cfg = lattice.config();
    const int c0 = center < 0 ? cfg.sites / 2 : center;
    if (c0 >= cfg.sites) throw UsageError("seed centre outside the lattice");
    dnlse::RelaxOptions opt;
    opt.dtau = dtau;
    opt.tol = tol;
    opt.residual_tol = residual_tol;
    opt.max_iter = max_iter;
    const auto r = dnlse::imaginary_time_ground_state(cfg, dnlse::gaussian_seed(cfg, c0, width), opt);

    CsvWriter profile(o.file("classical.csv"), {"k", "n", "re", "im"});
    SvgSeries s{"|b_k|^2", {}, {}, true};
    for (int k = 0; k < cfg.sites; ++k) {
      const Complex b = r.field.amplitudes[static_cast<std::size_t>(k)];
      profile.row({std::to_string(k), to_text(std::norm(b)), to_text(b.real()), to_text(b.imag())});
      s.x.push_back(k);
      s.y.push_back(std::norm(b));
    }
    CsvWriter summary(o.file("classical_summary.csv"), {"mu", "energy", "converged", "iterations", "residual"});
    summary.row({to_text(r.mu), to_text(r.energy), to_text(r.converged), std::to_string(r.iterations),
                 to_text(r.residual)});
    write_svg(o.file("classical.svg"), {"classical soliton", "site k", "n_k", {s}});

    out << fmt::format("mu {:.10g}  energy {:.10g}  iterations {}  residual {:.3g}\n", r.mu, r.energy, r.iterations,
                       r.residual);
    if (!r.converged) {
      err << "imaginary-time relaxation did not converge\n";
      return kRuntimeFailure;
    }
    return kSuccess;
  }
};

struct ExactCommand {
  Lattice lattice{4, 4, 1.0, -0.5};
  double beta = 0.0, degeneracy_tol = exact::kDefaultDegeneracyTol;
  int levels = 8;

  void add(Command& c) {
    lattice.add(c);
    c.option("beta", beta, "inverse temperature (0: ground state)")->check(CLI::NonNegativeNumber);
    c.option("degeneracy-tol", degeneracy_tol, "relative degeneracy tolerance");
    c.option("levels", levels, "lowest eigenvalues to report")->check(CLI::PositiveNumber);
  }

  int execute(Output& o, json&, std::ostream& out, std::ostream&) {
    const auto cfg = lattice.config();
    const exact::FockBasis basis(cfg);
    const auto h = exact::build_hamiltonian(basis);
    const int count = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(levels), basis.size()));
    const auto spectral = exact::ground_states(h, count, degeneracy_tol);
    const auto dist = beta > 0.0 ? exact::thermal_distribution(h, basis, beta)
                                 : exact::zero_temp_distribution(spectral, basis);

    auto header = occupation_columns(cfg.sites);
    header.insert(header.begin(), "state");
    header.push_back("probability");
    CsvWriter d(o.file("exact_distribution.csv"), header);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      std::vector<std::string> row{std::to_string(i)};
      append_occupations(row, basis.occupations(i));
      row.push_back(to_text(dist.probabilities[i]));
      d.row(row);
    }
    CsvWriter e(o.file("exact_spectrum.csv"), {"level", "energy"});
    for (Eigen::Index i = 0; i < spectral.eigenvalues.size(); ++i) {
      e.row({std::to_string(i), to_text(spectral.eigenvalues(i))});
    }
    if (cfg.sites == 2) {
      CsvWriter t(o.file("exact_two_site.csv"), {"n", "n/N", "P_n"});
      const auto p = dist.two_site_marginal();
      for (int n = 0; n <= cfg.atoms; ++n) {
        t.row({std::to_string(n), to_text(static_cast<double>(n) / cfg.atoms), to_text(p[static_cast<std::size_t>(n)])});
      }
    }
    out << fmt::format("dimension {}  E0 {:.12g}  degenerate ground states {}\n", basis.size(),
                       spectral.eigenvalues(0), spectral.degenerate_count);
    return kSuccess;
  }
};

struct Fig1Command {
  double lambda = -2.309, delta = 1.0;
  std::vector<int> atoms{8, 16, 32, 64, 128, 256, 512, 1024};
  std::string state = "mixture";

  void add(Command& c) {
    c.option("lambda", lambda, "N kappa / delta");
    c.option("delta", delta, "tunneling amplitude");
    c.option("atoms", atoms, "comma-separated atom numbers")->delimiter(',');
    c.option("state", state, "mixture of the two lowest states, or the ground state alone")
        ->check(CLI::IsMember({"mixture", "ground"}));
  }

  std::vector<exact::TwoSiteCurve> curves() const {
    if (state == "mixture") return exact::two_site_scan(atoms, lambda, delta);
    std::vector<exact::TwoSiteCurve> out;
    for (int n : atoms) {
      const exact::FockBasis basis(validate({2, n, delta, lambda * delta / n}));
      const auto h = exact::build_hamiltonian(basis);
      const auto sp = exact::ground_states(h, std::min(2, n + 1));
      exact::TwoSiteCurve c;
      c.atoms = n;
      c.kappa = lambda * delta / n;
      c.probabilities = exact::mixture_distribution(sp, basis, 1).two_site_marginal();
      c.splitting = sp.eigenvalues.size() > 1 ? sp.eigenvalues(1) - sp.eigenvalues(0) : 0.0;
      out.push_back(std::move(c));
    }
    return out;
  }

  int execute(Output& o, json&, std::ostream& out, std::ostream&) {
    if (atoms.empty()) throw UsageError("fig1 needs at least one atom number");
    const auto curves = this->curves();
    CsvWriter csv(o.file("fig1.csv"), {"N", "n", "n/N", "P_n", "sqrtN_Pn"});
    CsvWriter peaks(o.file("fig1_peaks.csv"), {"N", "peak1", "peak2", "width1", "width2"});
    SvgChart chart{fmt::format("two-site number statistics, Lambda = {}", lambda), "n/N", "sqrt(N) P_n", {}};
    for (const auto& c : curves) {
      SvgSeries s{"N = " + std::to_string(c.atoms), {}, {}, false};
      const double root = std::sqrt(static_cast<double>(c.atoms));
      for (int n = 0; n <= c.atoms; ++n) {
        const double p = c.probabilities[static_cast<std::size_t>(n)];
        const double x = static_cast<double>(n) / c.atoms;
        csv.row({std::to_string(c.atoms), std::to_string(n), to_text(x), to_text(p), to_text(root * p)});
        s.x.push_back(x);
        s.y.push_back(root * p);
      }
      chart.series.push_back(std::move(s));
      const auto st = analysis::peak_statistics(c.probabilities, c.atoms);
      const std::size_t hi = st.means.size() - 1;
      peaks.row({std::to_string(c.atoms), to_text(st.means[0]), to_text(st.means[hi]), to_text(st.widths[0]),
                 to_text(st.widths[hi])});
      out << fmt::format("N {:5d}  peaks {:.4f} {:.4f}  widths {:.4f} {:.4f}\n", c.atoms, st.means[0], st.means[hi],
                         st.widths[0], st.widths[hi]);
    }
    write_svg(o.file("fig1.svg"), chart);
    return kSuccess;
  }
};

struct QmcCommand {
  Lattice lattice{4, 4, 1.0, -0.5};
  qmc::SamplerConfig s;
  std::string seeding = "uniform";
  int chains = 1;

  QmcCommand() { s.beta = 20.0; }

  void add(Command& c) {
    lattice.add(c);
    c.option("beta", s.beta, "inverse temperature");
    c.option("n-beta", s.n_beta, "Trotter steps (0: automatic)");
    c.option("thermalization", s.thermalization_sweeps, "minimum thermalization sweeps");
    c.flag("adaptive", s.adaptive_thermalization, "extend thermalization until the energy trace is flat");
    c.option("stride", s.stride, "sweeps between retained samples");
    c.option("samples", s.n_samples, "retained samples per chain");
    c.option("seed", s.seed, "random seed");
    c.option("stream", s.stream_id, "stream id of the first chain");
    c.option("chains", chains, "independent chains run concurrently")->check(CLI::PositiveNumber);
    c.option("seeding", seeding, "uniform or narrow")->check(CLI::IsMember({"uniform", "narrow"}));
    c.option("center", s.seeding.center, "narrow seeding centre site");
    c.option("width", s.seeding.width, "narrow seeding width");
    c.flag("winding", s.winding_moves, "winding-number moves");
    c.flag("symmetry", s.symmetry_moves, "rigid translation moves");
    c.flag("allow-coarse-trotter", s.allow_coarse_trotter, "permit a coarse inverse-temperature step");
    c.option("sample-slice", s.sample_slice, "slice read out as the sample");
  }

  int execute(Output& o, json& manifest, std::ostream& out, std::ostream& err) {
    const auto cfg = lattice.config();
    qmc::SamplerConfig sampler = s;
    sampler.seeding.kind = seeding == "narrow" ? qmc::SeedingKind::Narrow : qmc::SeedingKind::Uniform;
    qmc::resolve_sampler(cfg, sampler);
    json seeds = json::array();
    for (int c = 0; c < chains; ++c) {
      seeds.push_back({{"chain", c}, {"seed", sampler.seed}, {"stream_id", sampler.stream_id + static_cast<std::uint64_t>(c)}});
    }
    manifest["seeds"] = seeds;
    manifest["n_beta"] = sampler.n_beta;

    const auto r = qmc::run_chains(cfg, sampler, chains);
    for (const auto& w : std::set<std::string>(r.warnings.begin(), r.warnings.end())) err << "warning: " << w << '\n';

    auto header = occupation_columns(cfg.sites);
    header.insert(header.begin(), {"sample", "chain"});
    CsvWriter samples(o.file("qmc_samples.csv"), header);
    std::map<NumberState, long> histogram;
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      std::vector<std::string> row{std::to_string(i), std::to_string(r.chain_ids[i])};
      append_occupations(row, r.samples[i].occupations());
      samples.row(row);
      ++histogram[r.samples[i]];
    }

    CsvWriter diag(o.file("qmc_diagnostics.csv"), {"chain", "sweep", "energy", "acceptance"});
    const std::size_t per_chain = r.trace.size() / static_cast<std::size_t>(chains);
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      const auto& t = r.trace[i];
      diag.row({std::to_string(per_chain ? i / per_chain : 0), std::to_string(t.sweep), to_text(t.energy),
                to_text(t.acceptance)});
    }

    auto hh = occupation_columns(cfg.sites);
    hh.insert(hh.end(), {"count", "frequency"});
    CsvWriter hist(o.file("qmc_histogram.csv"), hh);
    for (const auto& [state, count] : histogram) {
      std::vector<std::string> row;
      append_occupations(row, state.occupations());
      row.push_back(std::to_string(count));
      row.push_back(to_text(static_cast<double>(count) / static_cast<double>(r.samples.size())));
      hist.row(row);
    }

    const auto energy = qmc::binning_estimate(r.sample_energies);
    CsvWriter summary(o.file("qmc_summary.csv"),
                      {"n_beta", "dtau", "acceptance", "winding_acceptance", "thermalization_sweeps", "energy",
                       "energy_error", "energy_autocorrelation"});
    summary.row({std::to_string(r.n_beta), to_text(r.dtau), to_text(r.acceptance_rate),
                 to_text(r.winding_acceptance_rate), std::to_string(r.thermalization_sweeps), to_text(energy.mean),
                 to_text(energy.error), to_text(r.energy_autocorrelation)});

    SvgChart chart{"energy trace", "sweep", "energy estimate", {}};
    for (int c = 0; c < chains && per_chain; ++c) {
      SvgSeries line{"chain " + std::to_string(c), {}, {}, false};
      for (std::size_t i = static_cast<std::size_t>(c) * per_chain; i < static_cast<std::size_t>(c + 1) * per_chain; ++i) {
        line.x.push_back(static_cast<double>(r.trace[i].sweep));
        line.y.push_back(r.trace[i].energy);
      }
      chart.series.push_back(std::move(line));
    }
    write_svg(o.file("qmc_energy.svg"), chart);

    out << fmt::format("n_beta {}  samples {}  acceptance {:.4f}  energy {:.6g} +- {:.2g}\n", r.n_beta,
                       r.samples.size(), r.acceptance_rate, energy.mean, energy.error);
    return kSuccess;
  }
};

struct CompareCommand {
  std::string classical, samples;

  void add(Command& c) {
    c.option("classical", classical, "classical profile CSV (column n)")->required();
    c.option("samples", samples, "samples CSV (columns n_0 ...)")->required();
  }

  int execute(Output& o, json&, std::ostream& out, std::ostream&) {
    const auto ref_table = read_csv(classical);
    const std::size_t nc = ref_table.column("n");
    std::vector<double> ref;
    for (const auto& row : ref_table.rows) ref.push_back(parse_real(row[nc]));

    const auto sample_table = read_csv(samples);
    std::vector<std::size_t> cols;
    for (int k = 0;; ++k) {
      const auto it = std::find(sample_table.header.begin(), sample_table.header.end(), "n_" + std::to_string(k));
      if (it == sample_table.header.end()) break;
      cols.push_back(static_cast<std::size_t>(it - sample_table.header.begin()));
    }
    if (cols.size() != ref.size()) {
      throw std::runtime_error(fmt::format("samples have {} sites, the classical profile {}", cols.size(), ref.size()));
    }

    CsvWriter csv(o.file("compare.csv"), {"sample_id", "shift", "d", "score"});
    SvgChart chart{"aligned samples and classical profile", "site k", "n_k", {}};
    std::vector<double> sites(ref.size());
    std::iota(sites.begin(), sites.end(), 0.0);
    chart.series.push_back({"classical", sites, ref, true});
    for (std::size_t i = 0; i < sample_table.rows.size(); ++i) {
      std::vector<int> n;
      for (std::size_t c : cols) n.push_back(std::stoi(sample_table.rows[i][c]));
      const NumberState state(n);
      const auto a = analysis::align(state, ref);
      const double score = analysis::soliton_score(state);
      csv.row({std::to_string(i), std::to_string(a.shift), to_text(a.distance), to_text(score)});
      std::vector<double> y(a.aligned.occupations().begin(), a.aligned.occupations().end());
      chart.series.push_back({"sample " + std::to_string(i), sites, y, false});
      out << fmt::format("sample {:3d}  shift {:3d}  d {:.3f}  score {:.3f}\n", i, a.shift, a.distance, score);
    }
    write_svg(o.file("compare.svg"), chart);
    return kSuccess;
  }
};

// Reads `key = value` lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("{}:{}: expected key = value", path.string(), number));
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

fs::path default_output_dir() {
  const char* env = std::getenv(kOutputDirVariable);
  return env && *env ? fs::path(env) : fs::path(".");
}

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err);

int replay(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::string manifest_path, out_dir;
  CLI::App app("re-run a command from its manifest", "latsol replay");
  app.add_option("manifest", manifest_path, "manifest JSON")->required();
  app.add_option("--out", out_dir, "output directory (default: the manifest's)");
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsageError;
  }
  std::ifstream is(manifest_path);
  if (!is) throw UsageError("cannot read " + manifest_path);
  json m;
  try {
    m = json::parse(is);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad manifest: ") + e.what());
  }
  std::vector<std::string> replay_args{m.at("command").get<std::string>()};
  for (const auto& [key, value] : m.at("parameters").items()) replay_args.push_back("--" + key + "=" + value.get<std::string>());
  replay_args.push_back("--out");
  replay_args.push_back(out_dir.empty() ? m.at("output_dir").get<std::string>() : out_dir);
  return dispatch(replay_args, out, err);
}

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  if (!args.empty() && args.front() == "replay") return replay({args.begin() + 1, args.end()}, out, err);

  CLI::App app("Bose-Hubbard ring solitons: classical, exact and world-line Monte Carlo", "latsol");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  ClassicalCommand classical;
  ExactCommand exact_cmd;
  Fig1Command fig1;
  QmcCommand qmc_cmd;
  CompareCommand compare;
  std::map<std::string, Command> commands;
  std::map<std::string, std::function<int(Output&, json&, std::ostream&, std::ostream&)>> runners;
  std::string config_path;
  fs::path out_dir = default_output_dir();

  auto make = [&](const std::string& name, const std::string& help, auto& cmd) {
    Command& c = commands[name];
    c.app = app.add_subcommand(name, help);
    cmd.add(c);
    c.app->add_option("--config", config_path, "key = value file; flags given on the command line win");
    c.app->add_option("--out", out_dir, fmt::format("output directory (default ${} or .)", kOutputDirVariable));
    runners[name] = [&cmd](Output& o, json& m, std::ostream& os, std::ostream& es) { return cmd.execute(o, m, os, es); };
  };
  make("classical", "classical soliton by imaginary-time relaxation", classical);
  make("exact", "exact number statistics by diagonalization", exact_cmd);
  make("fig1", "two-site statistics scaled by sqrt(N) for several N", fig1);
  make("qmc", "world-line Monte Carlo samples", qmc_cmd);
  make("compare", "align samples to a classical profile", compare);
  app.footer("Also: latsol replay MANIFEST [--out DIR]. Exit codes: 0 success, 1 runtime failure, 2 usage error.");

  // Config entries go in front of the command-line flags so the latter win.
  if (!args.empty() && commands.count(args.front())) {
    const Command& c = commands.at(args.front());
    for (std::size_t i = 1; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
      if (path.empty()) continue;
      std::vector<std::string> injected;
      for (const auto& [key, value] : read_config(path)) {
        if (!c.knows(key)) throw UsageError(fmt::format("unknown key '{}' in {}", key, path));
        injected.push_back("--" + key + "=" + value);
      }
      args.insert(args.begin() + 1, injected.begin(), injected.end());
      break;
    }
  }

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsageError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  fs::create_directories(out_dir);
  Output o{out_dir, {}};
  json manifest;
  manifest["command"] = name;
  manifest["version"] = kVersion;
  manifest["output_dir"] = out_dir.string();
  json params = json::object();
  for (const auto& [key, value] : commands.at(name).params) params[key] = value();
  manifest["parameters"] = params;
  manifest["started"] = now_utc();

  const int code = runners.at(name)(o, manifest, out, err);

  manifest["finished"] = now_utc();
  manifest["exit_code"] = code;
  manifest["outputs"] = o.files;
  std::ofstream mf(out_dir / (name + "_manifest.json"), std::ios::binary | std::ios::trunc);
  mf << manifest.dump(2) << '\n';
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::length_error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace latsol::cli
