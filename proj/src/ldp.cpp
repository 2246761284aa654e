#include "fpt/ldp.hpp"

#include "fpt/channel.hpp"
#include "fpt/optimize.hpp"
#include "fpt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpt {

namespace {

constexpr double kLambdaCap = 700.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sojourn_lambda_max(const ServiceMatrices& sm) {
  const double rho = spectral_radius(sm.fail);
  return rho > 0.0 ? std::min(kLambdaCap, -std::log(rho) + std::log1p(-1e-8)) : kLambdaCap;
}

template <typename F>
RateCurvePoint legendre(F&& log_mgf, double x, double lo, double hi) {
  auto objective = [&](double lambda) {
    const double v = lambda * x - log_mgf(lambda);
    return std::isnan(v) ? -kInf : v;
  };
  RateCurvePoint pt;
  pt.x = x;
  const auto best = golden_section_max(objective, lo, hi, 1e-10);
  pt.maximizer = best.arg;
  pt.value = best.value;
  const double at_zero = objective(0.0);
  if (at_zero > pt.value) {
    pt.value = at_zero;
    pt.maximizer = 0.0;
  }
  if (!std::isfinite(pt.value)) pt.converged = false;
  if (pt.value < -1e-12) pt.converged = false;
  pt.value = std::max(pt.value, 0.0);
  const double edge = 1e-6 * (hi - lo);
  if (pt.maximizer <= lo + edge || (hi >= kLambdaCap && pt.maximizer >= hi - edge))
    pt.saturated = true;
  return pt;
}

}  // namespace

double log_mgf_sojourn(const ServiceMatrices& sm, double lambda) {
  const double rho_k = spectral_radius(sm.fail);
  if (rho_k > 0.0 && lambda >= -std::log(rho_k)) return kInf;
  const double z = std::exp(lambda);
  const auto k = sm.fail.rows();
  const Matrix g = (Matrix::Identity(k, k) - z * sm.fail)
                       .partialPivLu()
                       .solve(sm.succ)
                       .cwiseMax(0.0);
  const double rho = spectral_radius(g);
  if (!std::isfinite(rho)) return kInf;
  return lambda + std::log(rho);
}

double log_mgf_service(const ServiceMatrices& sm, double lambda) {
  if (lambda > 0.0)
    return lambda + std::log(spectral_radius(sm.fail * std::exp(-lambda) + sm.succ));
  return std::log(spectral_radius(sm.fail + sm.succ * std::exp(lambda)));
}

RateCurvePoint lambda_star(const ServiceMatrices& sm, double x) {
  if (!(x >= 1.0)) {
    RateCurvePoint pt;
    pt.x = x;
    pt.value = kInf;
    pt.saturated = true;
    return pt;
  }
  return legendre([&](double l) { return log_mgf_sojourn(sm, l); }, x, -kLambdaCap,
                  sojourn_lambda_max(sm));
}

RateCurvePoint rate_I(const ServiceMatrices& sm, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::BadArgs, "service rate must lie in [0,1]");
  return legendre([&](double l) { return log_mgf_service(sm, l); }, x, -kLambdaCap, kLambdaCap);
}

Matrix pi_lambda(const ServiceMatrices& sm, double lambda) {
  const auto k = sm.fail.rows();
  Matrix p(2 * k, 2 * k);
  const Matrix scaled = sm.succ * std::exp(lambda);
  p << sm.fail, scaled, sm.fail, scaled;
  return p;
}

AsymptoticMeans asymptotic_means(const ServiceMatrices& sm) {
  const auto k = sm.fail.rows();
  const Vector ones = Vector::Ones(k);
  const RowVector pi_d = stationary_of(sm.fail + sm.succ);
  const auto lu = (Matrix::Identity(k, k) - sm.fail).partialPivLu();
  const Matrix g1 = lu.solve(sm.succ);
  const Matrix dg = g1 + lu.solve(sm.fail * g1);
  const RowVector pi_t = stationary_of(g1);
  return {pi_t * dg * ones, pi_d * sm.succ * ones};
}

double reciprocal_check(const ServiceMatrices& sm, const std::vector<double>& x_grid) {
  double worst = 0.0;
  for (double x : x_grid) {
    const auto i = rate_I(sm, x);
    const auto l = lambda_star(sm, 1.0 / x);
    worst = std::max(worst, std::abs(i.value - x * l.value));
  }
  return worst;
}

RateCurvePoint scaled_lambda_star(const ServiceMatrices& sm, double tau) {
  const double k = static_cast<double>(sm.code.info_bits);
  const double n = static_cast<double>(sm.code.block_len);
  auto pt = lambda_star(sm, k * tau / n);
  pt.x = tau;
  pt.value /= k;
  return pt;
}

RateCurvePoint scaled_rate_I(const ServiceMatrices& sm, double eta) {
  const double k = static_cast<double>(sm.code.info_bits);
  const double n = static_cast<double>(sm.code.block_len);
  if (n * eta / k > 1.0) {
    RateCurvePoint pt;
    pt.x = eta;
    pt.value = kInf;
    pt.saturated = true;
    return pt;
  }
  auto pt = rate_I(sm, n * eta / k);
  pt.x = eta;
  pt.value /= n;
  return pt;
}

RateCurvePoint delay_exponent(const ServiceMatrices& sm, double tau) {
  const double k = static_cast<double>(sm.code.info_bits);
  const double n = static_cast<double>(sm.code.block_len);
  if (k * tau / n <= asymptotic_means(sm).sojourn) {
    RateCurvePoint pt;
    pt.x = tau;
    return pt;
  }
  return scaled_lambda_star(sm, tau);
}

RateCurvePoint throughput_exponent(const ServiceMatrices& sm, double eta) {
  const double k = static_cast<double>(sm.code.info_bits);
  const double n = static_cast<double>(sm.code.block_len);
  if (n * eta / k >= asymptotic_means(sm).service) {
    RateCurvePoint pt;
    pt.x = eta;
    return pt;
  }
  return scaled_rate_I(sm, eta);
}

}  // namespace fpt
