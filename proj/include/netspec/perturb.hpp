#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "netspec/graph.hpp"
#include "netspec/linalg.hpp"

namespace netspec {

struct PerturbationSpec {
  double magnitude;  // a > 0
  std::uint64_t seed;
};

/// w_ii += d_ii and w_ij += d_ij for j in N_i, every d independent and
/// uniform on [-a, a]. Draw order: node-major, diagonal first, then
/// neighbors ascending. Entries off the Assumption-1 pattern stay exactly
/// zero, and |w - wbar| <= a holds entrywise in floating point.
WAssignment perturb_w(const WAssignment& wbar, const PerturbationSpec& spec);

struct SweepTrial {
  double magnitude;
  std::size_t trial;
  std::size_t rank;
  double condition;
  double spectrum_error;  // NaN when root finding failed
};

struct SweepSummary {
  double magnitude;
  std::size_t trials;
  double nonsingular_fraction;
  double median_spectrum_error;
  double median_condition;
  std::size_t root_failures;
};

struct SweepReport {
  std::vector<SweepTrial> trials;
  std::vector<SweepSummary> summaries;
};

/// For every magnitude and trial: perturb, draw y0, build the Krylov matrix,
/// record its rank and condition, and the matched distance between the
/// spectra of W and wbar. Magnitude 0 is a control row without perturbation.
/// Trial t uses the same random streams at every magnitude.
SweepReport perturbation_sweep(const WAssignment& wbar, std::span<const double> magnitudes,
                               std::size_t trials, std::uint64_t seed,
                               double rank_tol = kDefaultRankTolerance);

}  // namespace netspec
