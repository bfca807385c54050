#include "gbs/calculus.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gbs/rng.hpp"

namespace gbs {

namespace {

GrassmannNumber with_coefficient_shift(const GrassmannNumber& g, std::uint32_t mask, Complex dc) {
  GrassmannNumber out = g;
  out.add_coefficient(mask, dc);
  return out;
}

GrassmannNumber wirtinger_partial(
    const std::function<GrassmannNumber(const GrassmannNumber&)>& f, const GrassmannNumber& at,
    std::uint32_t mask) {
  const double h = 1e-6 * std::max(1.0, norm(at));
  GrassmannNumber d_re = f(with_coefficient_shift(at, mask, Complex{h, 0.0})) -
                         f(with_coefficient_shift(at, mask, Complex{-h, 0.0}));
  d_re *= Complex{1.0 / (2.0 * h), 0.0};
  GrassmannNumber d_im = f(with_coefficient_shift(at, mask, Complex{0.0, h})) -
                         f(with_coefficient_shift(at, mask, Complex{0.0, -h}));
  d_im *= Complex{1.0 / (2.0 * h), 0.0};
  // d/dG = (d/dRe - i d/dIm) / 2
  return Complex{0.5, 0.0} * d_re - Complex{0.0, 0.5} * d_im;
}

}  // namespace

GrassmannNumber coefficient_partial(
    const std::function<GrassmannNumber(const GrassmannNumber&)>& f,
    const GrassmannNumber& at, std::uint32_t monomial_mask) {
  return wirtinger_partial(f, at, monomial_mask);
}

GrassmannNumber coefficient_partial(const Expression& f, const std::string& var,
                                    std::uint32_t monomial_mask, const Assignment& assignment) {
  auto it = assignment.find(var);
  if (it == assignment.end())
    throw std::invalid_argument("coefficient_partial: variable not in assignment");
  Assignment probe = assignment;
  auto eval_at = [&](const GrassmannNumber& v) {
    probe.find(var)->second = v;
    return f.eval(probe);
  };
  return wirtinger_partial(eval_at, it->second, monomial_mask);
}

LocalBehaviourReport check_local_behaviour(const Expression& f, const std::string& var,
                                           const Assignment& assignment,
                                           const GrassmannNumber& delta) {
  auto it = assignment.find(var);
  if (it == assignment.end())
    throw std::invalid_argument("check_local_behaviour: variable not in assignment");
  const GrassmannNumber& g = it->second;
  detail::require_same_space(g, delta);

  GrassmannNumber f0 = f.eval(assignment);
  Assignment shifted = assignment;
  shifted.find(var)->second = g + delta;
  GrassmannNumber increment = f.eval(shifted) - f0;

  GrassmannNumber d_even = f.metric_derivative(var, MetricDerivativeKind::left_even).eval(assignment);
  GrassmannNumber d_odd = f.metric_derivative(var, MetricDerivativeKind::left_odd).eval(assignment);
  GrassmannNumber metric_form = even_part(delta) * d_even + odd_part(delta) * d_odd;

  GrassmannNumber fd_form = GrassmannNumber::zero(g.space());
  delta.for_each_term([&](std::uint32_t mask, Complex dc) {
    fd_form += dc * coefficient_partial(f, var, mask, assignment);
  });

  LocalBehaviourReport rep{increment, metric_form, fd_form, 0.0, 0.0};
  rep.increment_residual = distance(increment, metric_form);
  rep.fd_residual = distance(fd_form, metric_form);
  return rep;
}

IntegrationByPartsReport check_integration_by_parts(const Expression& f, const Expression& h,
                                                    const std::string& var,
                                                    GeneratorSpace::Ptr space,
                                                    double gaussian_width, std::size_t samples,
                                                    std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("check_integration_by_parts: no samples");
  const int ngen = space->count();
  if (ngen > GrassmannNumber::kDenseLimit)
    throw std::invalid_argument("check_integration_by_parts: space too large");
  std::vector<std::uint32_t> odd_masks;
  for (std::uint32_t m = 1; m < (std::uint32_t{1} << ngen); ++m)
    if (std::popcount(m) & 1) odd_masks.push_back(m);

  const double width2 = gaussian_width * gaussian_width;
  Expression d_odd_f = f.metric_derivative(var, MetricDerivativeKind::left_odd);

  const std::uint32_t full = std::uint32_t{1} << ngen;
  std::vector<Complex> sum1(full), sum2(full), sum3(full), sum_r(full);
  std::vector<double> sumsq_r_re(full, 0.0), sumsq_r_im(full, 0.0);

  GaussianStream rng(seed);
  Assignment a;
  a.emplace(var, GrassmannNumber::zero(space));
  const double fd_step = 1e-6 * std::max(1.0, gaussian_width);

  for (std::size_t k = 0; k < samples; ++k) {
    GrassmannNumber g = GrassmannNumber::zero(space);
    for (auto m : odd_masks) {
      // complex Gaussian with E|G|^2 = width^2
      double re = rng.next() * gaussian_width * 0.7071067811865476;
      double im = rng.next() * gaussian_width * 0.7071067811865476;
      g.set_coefficient(m, Complex{re, im});
    }
    a.find(var)->second = g;

    GrassmannNumber fv = f.eval(a);
    GrassmannNumber hv = h.eval(a);
    if (!even_part(hv).is_zero())
      throw std::invalid_argument("check_integration_by_parts: h must be odd-sector valued");

    // divergence of h's coefficient functions over the odd coordinates,
    // by central differences (holomorphic part; h is algebraic in g)
    Complex div{};
    for (auto m : odd_masks) {
      auto eval_h_at = [&](Complex shift) {
        Assignment probe = a;
        GrassmannNumber gp = g;
        gp.add_coefficient(m, shift);
        probe.find(var)->second = gp;
        return h.eval(probe).coefficient(m);
      };
      Complex d_re = (eval_h_at(Complex{fd_step, 0.0}) - eval_h_at(Complex{-fd_step, 0.0})) /
                     (2.0 * fd_step);
      Complex d_im = (eval_h_at(Complex{0.0, fd_step}) - eval_h_at(Complex{0.0, -fd_step})) /
                     (2.0 * fd_step);
      div += 0.5 * (d_re - Complex{0.0, 1.0} * d_im);
    }
    GrassmannNumber x1 = div * fv;

    GrassmannNumber x2 = -(hv * d_odd_f.eval(a));

    // -E[f * h·grad log P]; for the Gaussian, grad_G log P = -G*/width^2
    Complex hdotg{};
    for (auto m : odd_masks) hdotg += hv.coefficient(m) * std::conj(g.coefficient(m));
    GrassmannNumber x3 = (hdotg / width2) * fv;

    GrassmannNumber r = x1 - x2 - x3;
    for (std::uint32_t m = 0; m < full; ++m) {
      sum1[m] += x1.coefficient(m);
      sum2[m] += x2.coefficient(m);
      sum3[m] += x3.coefficient(m);
      Complex rc = r.coefficient(m);
      sum_r[m] += rc;
      sumsq_r_re[m] += rc.real() * rc.real();
      sumsq_r_im[m] += rc.imag() * rc.imag();
    }
  }

  const double n = static_cast<double>(samples);
  auto mean_of = [&](const std::vector<Complex>& s) {
    GrassmannNumber out = GrassmannNumber::zero(space);
    for (std::uint32_t m = 0; m < full; ++m) out.set_coefficient(m, s[m] / n);
    return out;
  };
  IntegrationByPartsReport rep{mean_of(sum1), mean_of(sum2), mean_of(sum3),
                               mean_of(sum_r), GrassmannNumber::zero(space),
                               0.0, 0.0, samples};
  double max_z = 0.0;
  for (std::uint32_t m = 0; m < full; ++m) {
    Complex mu = sum_r[m] / n;
    double var_re = std::max(0.0, sumsq_r_re[m] / n - mu.real() * mu.real());
    double var_im = std::max(0.0, sumsq_r_im[m] / n - mu.imag() * mu.imag());
    double se_re = std::sqrt(var_re / n);
    double se_im = std::sqrt(var_im / n);
    rep.residual_se.set_coefficient(m, Complex{se_re, se_im});
    if (se_re > 0.0) max_z = std::max(max_z, std::abs(mu.real()) / se_re);
    else if (std::abs(mu.real()) > 0.0) max_z = std::max(max_z, 1e300);
    if (se_im > 0.0) max_z = std::max(max_z, std::abs(mu.imag()) / se_im);
    else if (std::abs(mu.imag()) > 0.0) max_z = std::max(max_z, 1e300);
  }
  rep.residual_norm = norm(rep.residual);
  rep.max_abs_z = max_z;
  return rep;
}

}  // namespace gbs
