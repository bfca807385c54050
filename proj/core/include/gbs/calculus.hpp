#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "gbs/expression.hpp"

namespace gbs {

/// Numerical partial derivative of `f` with respect to the stored coefficient
/// of `monomial_mask` in the value bound to `var`: central finite differences
/// with independent real/imaginary probes, combined into the holomorphic
/// (Wirtinger) derivative. Step: 1e-6 * max(1, ||value||).
GrassmannNumber coefficient_partial(const Expression& f, const std::string& var,
                                    std::uint32_t monomial_mask, const Assignment& assignment);

/// Same, for an opaque single-argument functional of the variable's value.
GrassmannNumber coefficient_partial(
    const std::function<GrassmannNumber(const GrassmannNumber&)>& f,
    const GrassmannNumber& at, std::uint32_t monomial_mask);

/// Consistency report between ordinary coefficient-space calculus and the
/// metric Grassmann derivatives at a point, for an increment `delta`:
///
///   increment            f(g+delta) - f(g)
///   metric_linear_form   delta+ * (left-even deriv) + delta- * (left-odd deriv)
///   fd_linear_form       sum_A Delta_A * coefficient_partial(f, A)
///
/// `increment_residual` = ||increment - metric_linear_form|| is the Taylor
/// remainder, O(||delta||^2). `fd_residual` = ||fd_linear_form -
/// metric_linear_form|| sits at the finite-difference noise floor.
struct LocalBehaviourReport {
  GrassmannNumber increment;
  GrassmannNumber metric_linear_form;
  GrassmannNumber fd_linear_form;
  double increment_residual;
  double fd_residual;
};

LocalBehaviourReport check_local_behaviour(const Expression& f, const std::string& var,
                                           const Assignment& assignment,
                                           const GrassmannNumber& delta);

/// Monte Carlo check of the coefficient-space integration-by-parts identity
/// over the odd sector, with P a normalized product of independent complex
/// Gaussians (width `gaussian_width`) on each odd-monomial coefficient:
///
///   E[f * div h] = -E[h * (left-odd metric deriv of f)] + E[f * sum_A H_A G_A*] / width^2
///
/// (the last term is -E[f * h-directional derivative of log P] * P). The
/// three estimates and the per-sample residual come back with coefficient-
/// wise standard errors; `max_abs_z` is the largest |residual|/SE over
/// coefficients. h must evaluate into the odd sector.
struct IntegrationByPartsReport {
  GrassmannNumber divergence_integral;   // E[f * div h]
  GrassmannNumber flow_integral;         // -E[h * d-(f)]
  GrassmannNumber density_integral;      // -E[f * h·grad log P]
  GrassmannNumber residual;              // mean of per-sample residuals
  GrassmannNumber residual_se;           // coefficient-wise standard errors
  double residual_norm;
  double max_abs_z;
  std::size_t samples;
};

IntegrationByPartsReport check_integration_by_parts(const Expression& f, const Expression& h,
                                                    const std::string& var,
                                                    GeneratorSpace::Ptr space,
                                                    double gaussian_width, std::size_t samples,
                                                    std::uint64_t seed);

}  // namespace gbs
