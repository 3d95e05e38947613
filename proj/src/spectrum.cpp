#include "netspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "netspec/errors.hpp"

namespace netspec {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Eval {
  Complex p;
  Complex dp;
};

// Horner on the monic polynomial with coefficients c (ascending).
Eval evaluate_with_derivative(std::span<const double> c, Complex z) {
  Complex p{1.0, 0.0};
  Complex dp{0.0, 0.0};
  for (std::size_t k = c.size(); k-- > 0;) {
    dp = dp * z + p;
    p = p * z + Complex{c[k], 0.0};
  }
  return {p, dp};
}

// sum_j |c_j| |z|^j including the leading 1; bounds the rounding error of
// Horner's rule up to a small multiple of eps.
double horner_scale(std::span<const double> c, double r) {
  double s = 1.0;
  for (std::size_t k = c.size(); k-- > 0;) s = s * r + std::abs(c[k]);
  return s;
}

ComplexVector aberth(std::span<const double> c, int max_iter) {
  const std::size_t n = c.size();
  if (n == 1) return {Complex{-c[0], 0.0}};

  double cauchy = 0.0;
  for (double x : c) cauchy = std::max(cauchy, std::abs(x));
  const double radius = 1.0 + cauchy;
  // Rotated off the real axis so real roots are not approached by exact
  // conjugate pairs, which could never separate.
  const double offset = 0.4;
  const double two_pi = 2.0 * std::acos(-1.0);
  ComplexVector z(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double th = two_pi * static_cast<double>(k) / static_cast<double>(n) + offset;
    z[k] = {radius * std::cos(th), radius * std::sin(th)};
  }

  std::vector<bool> done(n, false);
  std::vector<double> residual(n, std::numeric_limits<double>::infinity());
  for (int it = 0; it < max_iter; ++it) {
    bool all = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (done[k]) continue;
      const Eval e = evaluate_with_derivative(c, z[k]);
      residual[k] = e.p.abs();
      if (residual[k] <= 4.0 * kEps * horner_scale(c, z[k].abs())) {
        done[k] = true;
        continue;
      }
      all = false;
      if (e.dp.norm() == 0.0) {
        z[k] += Complex{kEps * radius, kEps * radius};
        continue;
      }
      const Complex ratio = e.p / e.dp;
      Complex sum{0.0, 0.0};
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        Complex d = z[k] - z[j];
        if (d.norm() == 0.0) d = Complex{kEps * radius, 0.0};
        sum += Complex{1.0, 0.0} / d;
      }
      const Complex w = ratio / (Complex{1.0, 0.0} - ratio * sum);
      z[k] -= w;
      if (w.abs() <= 2.0 * kEps * z[k].abs()) done[k] = true;
    }
    if (all) return z;
  }
  if (std::all_of(done.begin(), done.end(), [](bool b) { return b; })) return z;
  for (std::size_t k = 0; k < n; ++k) residual[k] = evaluate_with_derivative(c, z[k]).p.abs();
  throw RootFindingError("Aberth iteration did not converge in " + std::to_string(max_iter) +
                             " iterations",
                         residual);
}

// Merges near-conjugate roots into exact pairs and near-real roots onto the
// real axis. A pair is accepted when its mismatch is within the relative
// tolerance or within the roots' own inclusion radius (clusters from
// repeated roots are only resolved to that radius).
void symmetrize(std::span<const double> c, ComplexVector& z, double rel_tol) {
  const std::size_t n = z.size();
  std::vector<double> tol(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex prod{1.0, 0.0};
    for (std::size_t j = 0; j < n; ++j)
      if (j != k) prod *= z[k] - z[j];
    const double pk = evaluate_with_derivative(c, z[k]).p.abs();
    const double inclusion =
        prod.norm() > 0.0 ? static_cast<double>(n) * pk / prod.abs() : 0.0;
    tol[k] = std::max({rel_tol * z[k].abs(), 2.0 * inclusion,
                       std::numeric_limits<double>::min()});
  }

  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k; l < n; ++l) {
      const double d = distance(z[k], z[l].conj());
      if (d <= std::max(tol[k], tol[l])) cand.emplace_back(d, k, l);
    }
  std::sort(cand.begin(), cand.end());

  std::vector<bool> used(n, false);
  ComplexVector out = z;
  for (const auto& [d, k, l] : cand) {
    if (used[k] || used[l]) continue;
    used[k] = used[l] = true;
    if (k == l) {
      out[k] = {z[k].re, 0.0};
    } else {
      const double re = 0.5 * (z[k].re + z[l].re);
      const double im = 0.5 * (z[k].im - z[l].im);
      out[k] = {re, im};
      out[l] = {re, -im};
    }
  }
  if (!std::all_of(used.begin(), used.end(), [](bool b) { return b; })) {
    std::vector<double> residual(n);
    for (std::size_t k = 0; k < n; ++k) residual[k] = evaluate_with_derivative(c, z[k]).p.abs();
    throw RootFindingError("roots are not closed under conjugation", residual);
  }
  z = std::move(out);
}

}  // namespace

Complex evaluate(const CharPoly& p, Complex z) {
  return evaluate_with_derivative(p.coeffs, z).p;
}

ComplexVector find_roots(const CharPoly& p, const RootOptions& opts) {
  const std::size_t n = p.degree();
  if (n == 0) throw DimensionError("polynomial degree must be at least 1");
  for (double x : p.coeffs)
    if (!std::isfinite(x)) throw RootFindingError("non-finite coefficient", {});

  // Exact zero roots from vanishing low-order coefficients.
  std::size_t zeros = 0;
  while (zeros < n && p.coeffs[zeros] == 0.0) ++zeros;
  ComplexVector roots(zeros, Complex{0.0, 0.0});
  if (zeros < n) {
    const std::span<const double> reduced(p.coeffs.data() + zeros, n - zeros);
    ComplexVector z = aberth(reduced, opts.max_iter);
    symmetrize(reduced, z, opts.conjugate_tol);
    roots.insert(roots.end(), z.begin(), z.end());
  }

  const double bound = 1e-8 * (1.0 + norm_inf(p.coeffs));
  std::vector<double> residual(n);
  bool ok = true;
  for (std::size_t k = 0; k < n; ++k) {
    residual[k] = evaluate(p, roots[k]).abs();
    if (!(residual[k] <= bound)) ok = false;
  }
  if (!ok) throw RootFindingError("root residual exceeds tolerance", residual);
  return roots;
}

SpectrumError match_spectra(const ComplexVector& est, const ComplexVector& ref) {
  if (est.size() != ref.size()) throw DimensionError("spectra have different lengths");
  const std::size_t n = est.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  cand.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cand.emplace_back(distance(est[i], ref[j]), i, j);
  std::sort(cand.begin(), cand.end());

  SpectrumError out;
  out.pairs.resize(n);
  std::vector<bool> est_used(n, false), ref_used(n, false);
  for (const auto& [d, i, j] : cand) {
    if (est_used[i] || ref_used[j]) continue;
    est_used[i] = ref_used[j] = true;
    out.pairs[i] = {est[i], ref[j], d};
  }
  double sum = 0.0;
  for (const MatchedPair& m : out.pairs) {
    out.max_abs_error = std::max(out.max_abs_error, m.distance);
    sum += m.distance;
  }
  out.mean_abs_error = n ? sum / static_cast<double>(n) : 0.0;
  return out;
}

SpectrumTrace spectrum_trace(const FlowTrace& flow, const RootOptions& opts) {
  const std::size_t n = flow.node_count;
  SpectrumTrace out;
  for (const FlowSample& s : flow.samples) {
    for (NodeId i = 1; i <= n; ++i) {
      CharPoly p{std::vector<double>(s.x.begin() + static_cast<std::ptrdiff_t>((i - 1) * n),
                                     s.x.begin() + static_cast<std::ptrdiff_t>(i * n))};
      try {
        out.estimates.push_back({i, s.t, find_roots(p, opts)});
      } catch (const RootFindingError& e) {
        out.gaps.push_back({i, s.t, e.what()});
      }
    }
  }
  return out;
}

}  // namespace netspec
