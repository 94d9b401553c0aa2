#include "latsol/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace latsol {

LatticeConfig validate(const LatticeConfig& config) {
  if (config.sites < 2) {
    throw ConfigError(ConfigErrorKind::SiteCount,
                      "lattice needs at least 2 sites, got " + std::to_string(config.sites));
  }
  if (config.atoms < 1) {
    throw ConfigError(ConfigErrorKind::AtomCount,
                      "lattice needs at least 1 atom, got " + std::to_string(config.atoms));
  }
  if (!(config.delta > 0.0) || !std::isfinite(config.delta)) {
    throw ConfigError(ConfigErrorKind::Tunneling, "tunneling amplitude delta must be positive");
  }
  if (!std::isfinite(config.kappa)) {
    throw ConfigError(ConfigErrorKind::Parameter, "interaction kappa must be finite");
  }
  return config;
}

double coupling(const LatticeConfig& config) {
  return static_cast<double>(config.atoms) * config.kappa / config.delta;
}

double energy_scale(const LatticeConfig& config) {
  return std::max(config.delta, std::abs(config.kappa) * config.atoms);
}

NumberState::NumberState(std::vector<int> occupations) : n_(std::move(occupations)) {
  if (std::any_of(n_.begin(), n_.end(), [](int x) { return x < 0; })) {
    throw std::invalid_argument("occupation numbers must be nonnegative");
  }
}

long NumberState::total() const { return std::accumulate(n_.begin(), n_.end(), 0L); }

NumberState NumberState::shifted(int shift) const {
  const int L = sites();
  std::vector<int> out(n_.size());
  for (int k = 0; k < L; ++k) out[static_cast<std::size_t>(k)] = n_[static_cast<std::size_t>(wrap_site(k + shift, L))];
  return NumberState(std::move(out));
}

double ClassicalField::norm() const {
  double s = 0.0;
  for (const auto& b : amplitudes) s += std::norm(b);
  return s;
}

std::vector<double> ClassicalField::occupations() const {
  std::vector<double> n(amplitudes.size());
  std::transform(amplitudes.begin(), amplitudes.end(), n.begin(),
                 [](const Complex& b) { return std::norm(b); });
  return n;
}

void ClassicalField::normalize(double atoms) {
  const double current = norm();
  if (!(current > 0.0)) throw std::invalid_argument("cannot normalize a zero field");
  const double scale = std::sqrt(atoms / current);
  for (auto& b : amplitudes) b *= scale;
}

ClassicalField ClassicalField::shifted(int shift) const {
  const int L = sites();
  ClassicalField out{std::vector<Complex>(amplitudes.size())};
  for (int k = 0; k < L; ++k) {
    out.amplitudes[static_cast<std::size_t>(k)] = amplitudes[static_cast<std::size_t>(wrap_site(k + shift, L))];
  }
  return out;
}

namespace {
std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t RngStream::index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::index needs n > 0");
  // Reject the tail that would bias the modulo.
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double RngStream::normal() {
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace latsol
