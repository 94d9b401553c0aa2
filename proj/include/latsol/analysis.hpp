// Post-processing of sampled number states and two-site distributions.

#pragma once

#include <span>
#include <vector>

#include "latsol/core.hpp"

namespace latsol::analysis {

struct AlignmentResult {
  int shift = 0;       // aligned[k] = sample[(k + shift) mod L]
  double distance = 0.0;
  NumberState aligned;
};

/// l2 distance between a number state and real occupations, no shifting.
double l2_distance(const NumberState& sample, std::span<const double> reference);

/// Cyclic shift of `sample` closest to `reference` in l2; ties go to the
/// smallest shift. Reflections are not searched.
AlignmentResult align(const NumberState& sample, std::span<const double> reference);

struct PeakStatistics {
  std::vector<double> means;   // in units of n/N, ascending
  std::vector<double> widths;  // standard deviation of n/N within each peak
  bool single_peak = false;
};

/// Splits a two-site distribution P_n (n = 0..N) at n = N/2 and reports the
/// mean and spread of n/N within each half. Mass exactly at N/2 is shared
/// equally. A distribution whose maximum sits at the centre is reported as
/// one peak.
PeakStatistics peak_statistics(std::span<const double> distribution, int atoms);

inline constexpr int kScoreWindow = 3;

/// (max_k w_k - W N / L) / (N - W N / L), w_k the atoms in the W consecutive
/// sites centred on k, W = min(3, L - 1). 0 for an even spread, 1 when every
/// atom sits on one site.
double soliton_score(const NumberState& sample);

}  // namespace latsol::analysis
