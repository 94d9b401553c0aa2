#include "latsol/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latsol::analysis {

double l2_distance(const NumberState& sample, std::span<const double> reference) {
  if (static_cast<std::size_t>(sample.sites()) != reference.size()) {
    throw std::invalid_argument("sample and reference lengths differ");
  }
  double s = 0.0;
  for (int k = 0; k < sample.sites(); ++k) {
    const double d = sample[k] - reference[static_cast<std::size_t>(k)];
    s += d * d;
  }
  return std::sqrt(s);
}

AlignmentResult align(const NumberState& sample, std::span<const double> reference) {
  const int L = sample.sites();
  if (static_cast<std::size_t>(L) != reference.size()) {
    throw std::invalid_argument("sample and reference lengths differ");
  }
  AlignmentResult best;
  double best_sq = -1.0;
  for (int shift = 0; shift < L; ++shift) {
    double sq = 0.0;
    for (int k = 0; k < L; ++k) {
      const double d = sample[wrap_site(k + shift, L)] - reference[static_cast<std::size_t>(k)];
      sq += d * d;
    }
    if (best_sq < 0.0 || sq < best_sq) {
      best_sq = sq;
      best.shift = shift;
    }
  }
  best.distance = std::sqrt(best_sq);
  best.aligned = sample.shifted(best.shift);
  return best;
}

namespace {

struct Moments {
  double mass = 0.0, mean = 0.0, width = 0.0;
};

Moments moments(std::span<const double> weights, int atoms) {
  Moments m;
  double first = 0.0, second = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    const double x = static_cast<double>(n) / atoms;
    m.mass += weights[n];
    first += weights[n] * x;
    second += weights[n] * x * x;
  }
  if (m.mass <= 0.0) return m;
  m.mean = first / m.mass;
  m.width = std::sqrt(std::max(0.0, second / m.mass - m.mean * m.mean));
  return m;
}

}  // namespace

PeakStatistics peak_statistics(std::span<const double> distribution, int atoms) {
  if (atoms < 1 || distribution.size() != static_cast<std::size_t>(atoms) + 1) {
    throw std::invalid_argument("two-site distribution must have N + 1 entries");
  }
  PeakStatistics out;
  const auto peak = static_cast<int>(std::max_element(distribution.begin(), distribution.end()) - distribution.begin());
  // A maximum at the centre (n = N/2, or either middle bin for odd N) means one peak.
  if (2 * peak == atoms || 2 * peak == atoms - 1 || 2 * peak == atoms + 1) {
    const Moments m = moments(distribution, atoms);
    out.means = {m.mean};
    out.widths = {m.width};
    out.single_peak = true;
    return out;
  }
  std::vector<double> lower(distribution.size(), 0.0), upper(distribution.size(), 0.0);
  for (int n = 0; n <= atoms; ++n) {
    const double p = distribution[static_cast<std::size_t>(n)];
    if (2 * n < atoms) {
      lower[static_cast<std::size_t>(n)] = p;
    } else if (2 * n > atoms) {
      upper[static_cast<std::size_t>(n)] = p;
    } else {
      lower[static_cast<std::size_t>(n)] = 0.5 * p;
      upper[static_cast<std::size_t>(n)] = 0.5 * p;
    }
  }
  const Moments lo = moments(lower, atoms);
  const Moments hi = moments(upper, atoms);
  out.means = {lo.mean, hi.mean};
  out.widths = {lo.width, hi.width};
  return out;
}

double soliton_score(const NumberState& sample) {
  const int L = sample.sites();
  const long N = sample.total();
  if (L < 2 || N == 0) return 0.0;
  const int window = std::min(kScoreWindow, L - 1);
  const double baseline = static_cast<double>(window) * N / L;
  long best = 0;
  for (int k = 0; k < L; ++k) {
    long w = 0;
    // Centred on k; an even window extends one further to the right.
    for (int j = -(window - 1) / 2; j <= window / 2; ++j) w += sample[wrap_site(k + j, L)];
    best = std::max(best, w);
  }
  return (static_cast<double>(best) - baseline) / (static_cast<double>(N) - baseline);
}

}  // namespace latsol::analysis
