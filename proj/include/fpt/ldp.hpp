#pragma once

#include "fpt/arq_queue.hpp"
#include "fpt/types.hpp"

#include <vector>

namespace fpt {

/// Limiting scaled log-MGF of the per-segment sojourn,
/// log rho((I - K e^lambda)^{-1} M e^lambda); +infinity once
/// lambda >= -log rho(K).
double log_mgf_sojourn(const ServiceMatrices& sm, double lambda);

/// log rho(K + M e^lambda), the limiting log-MGF of the service count.
double log_mgf_service(const ServiceMatrices& sm, double lambda);

struct RateCurvePoint {
  double x = 0.0;
  double value = 0.0;
  double maximizer = 0.0;
  bool converged = true;
  /// The supremum diverges (or runs into the lambda cap): the rate is
  /// infinite and `value` is only a lower bound.
  bool saturated = false;
};

/// Fenchel-Legendre transform of log_mgf_sojourn at x. Averages below one
/// round per segment are impossible and come back saturated.
RateCurvePoint lambda_star(const ServiceMatrices& sm, double x);

/// Rate function of the empirical mean service at x in [0, 1].
RateCurvePoint rate_I(const ServiceMatrices& sm, double x);

/// [[K, M e^l], [K, M e^l]]: its nonzero spectrum equals that of K + M e^l.
Matrix pi_lambda(const ServiceMatrices& sm, double lambda);

struct AsymptoticMeans {
  /// Mean rounds per delivered segment.
  double sojourn = 0.0;
  /// Mean segments delivered per round.
  double service = 0.0;
};

AsymptoticMeans asymptotic_means(const ServiceMatrices& sm);

/// max |I(x) - x Lambda*(1/x)| over the grid.
double reciprocal_check(const ServiceMatrices& sm, const std::vector<double>& x_grid);

/// (1/K) Lambda*(K tau / N): decay rate of Pr(H0 >= tau * bits / N) in the
/// buffer size, per information bit.
RateCurvePoint scaled_lambda_star(const ServiceMatrices& sm, double tau);

/// (1/N) I(N eta / K): decay rate in the number of rounds of having
/// delivered fewer than eta information bits per transmitted symbol.
RateCurvePoint scaled_rate_I(const ServiceMatrices& sm, double eta);

/// One-sided versions: zero on the side of the mean that is not a
/// deviation (deadline below the mean sojourn, or throughput above the mean
/// service).
RateCurvePoint delay_exponent(const ServiceMatrices& sm, double tau);
RateCurvePoint throughput_exponent(const ServiceMatrices& sm, double eta);

}  // namespace fpt
