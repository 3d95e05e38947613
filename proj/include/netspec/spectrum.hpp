#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "netspec/complex.hpp"
#include "netspec/consensus.hpp"
#include "netspec/graph.hpp"
#include "netspec/linalg.hpp"

namespace netspec {

struct RootOptions {
  int max_iter = 500;
  /// Roots whose conjugate mismatch is below this fraction of their
  /// magnitude are merged into an exact conjugate pair (or made real).
  double conjugate_tol = 1e-6;
};

/// p(z) = z^N + c_{N-1} z^{N-1} + ... + c_0.
Complex evaluate(const CharPoly& p, Complex z);

/// Aberth-Ehrlich simultaneous iteration started on the Cauchy-bound circle.
/// Output is exactly closed under conjugation and every root satisfies
/// |p(z)| <= 1e-8 (1 + |c|_inf). Throws RootFindingError otherwise.
ComplexVector find_roots(const CharPoly& p, const RootOptions& opts = {});

struct MatchedPair {
  Complex estimate;
  Complex reference;
  double distance;
};

struct SpectrumError {
  std::vector<MatchedPair> pairs;  // in estimate order
  double max_abs_error = 0.0;
  double mean_abs_error = 0.0;
};

/// Greedy bijection: repeatedly pairs the globally closest unmatched
/// (estimate, reference) couple. Can be suboptimal for tight clusters.
SpectrumError match_spectra(const ComplexVector& est, const ComplexVector& ref);

struct SpectrumEstimate {
  NodeId node;
  double t;
  ComplexVector roots;
};

struct SpectrumGap {
  NodeId node;
  double t;
  std::string reason;
};

struct SpectrumTrace {
  std::vector<SpectrumEstimate> estimates;
  std::vector<SpectrumGap> gaps;
};

/// Roots of every node's coefficient estimate at every sample. Samples where
/// root finding fails become gaps.
SpectrumTrace spectrum_trace(const FlowTrace& flow, const RootOptions& opts = {});

}  // namespace netspec
