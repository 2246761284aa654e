#include "fpt/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

namespace fpt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::Periodic: return "Periodic";
    case ErrorCode::AllErasing: return "AllErasing";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::BadArgs: return "BadArgs";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TolUnreachable: return "TolUnreachable";
    case ErrorCode::TailTooHeavy: return "TailTooHeavy";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

constexpr double kStochasticTol = 1e-12;

std::vector<std::size_t> reachable_from(const Matrix& b, std::size_t src,
                                        std::vector<long>* level = nullptr) {
  const auto k = static_cast<std::size_t>(b.rows());
  std::vector<long> dist(k, -1);
  std::vector<std::size_t> order;
  std::queue<std::size_t> frontier;
  dist[src] = 0;
  frontier.push(src);
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    order.push_back(u);
    for (std::size_t v = 0; v < k; ++v) {
      if (b(u, v) > 0.0 && dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    }
  }
  if (level) *level = std::move(dist);
  return order;
}

bool irreducible(const Matrix& b) {
  const auto k = static_cast<std::size_t>(b.rows());
  if (reachable_from(b, 0).size() != k) return false;
  // Every state must also reach state 0: check on the transposed graph.
  return reachable_from(b.transpose(), 0).size() == k;
}

// For an irreducible chain the period is the gcd of level(u) + 1 - level(v)
// over all edges u -> v, with levels taken from a BFS rooted anywhere.
long period(const Matrix& b) {
  std::vector<long> level;
  reachable_from(b, 0, &level);
  const auto k = static_cast<std::size_t>(b.rows());
  long g = 0;
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v)
      if (b(u, v) > 0.0) g = std::gcd(g, std::labs(level[u] + 1 - level[v]));
  return g;
}

void check_probability_vector(const Vector& v, std::string_view what) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(v(i) >= 0.0 && v(i) <= 1.0))
      throw Error(ErrorCode::NotStochastic, std::string(what) + " entry outside [0,1]");
  if (std::abs(v.sum() - 1.0) > kStochasticTol)
    throw Error(ErrorCode::NotStochastic, std::string(what) + " does not sum to 1");
}

}  // namespace

Vector ChannelModel::to_original_order(const Vector& canonical) const {
  Vector out(canonical.size());
  for (std::size_t s = 0; s < labels_.size(); ++s)
    out(static_cast<Eigen::Index>(labels_[s])) = canonical(static_cast<Eigen::Index>(s));
  return out;
}

ChannelModel validate_channel(const Matrix& transition, const Vector& erasure,
                              const std::optional<Vector>& init) {
  const auto k = transition.rows();
  if (k < 1 || transition.cols() != k || erasure.size() != k ||
      (init && init->size() != k))
    throw Error(ErrorCode::BadDimensions, "transition must be k x k with k >= 1, "
                                          "erasure and initial vectors of length k");

  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j)
      if (!(transition(i, j) >= 0.0 && transition(i, j) <= 1.0))
        throw Error(ErrorCode::NotStochastic, "transition entry outside [0,1] at row " +
                                                  std::to_string(i));
    if (std::abs(transition.row(i).sum() - 1.0) > kStochasticTol)
      throw Error(ErrorCode::NotStochastic, "row " + std::to_string(i) + " does not sum to 1");
    if (!(erasure(i) >= 0.0 && erasure(i) <= 1.0))
      throw Error(ErrorCode::BadArgs, "erasure probability outside [0,1]");
  }
  if (init) check_probability_vector(*init, "initial distribution");
  if ((erasure.array() >= 1.0).all())
    throw Error(ErrorCode::AllErasing, "every state erases with probability one");
  if (!irreducible(transition)) throw Error(ErrorCode::Reducible, "transition graph is reducible");
  if (period(transition) != 1) throw Error(ErrorCode::Periodic, "transition graph is periodic");

  std::vector<std::size_t> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return erasure(static_cast<Eigen::Index>(a)) > erasure(static_cast<Eigen::Index>(b));
  });

  ChannelModel model;
  model.transition_.resize(k, k);
  model.erasure_.resize(k);
  for (Eigen::Index s = 0; s < k; ++s) {
    const auto from = static_cast<Eigen::Index>(order[static_cast<std::size_t>(s)]);
    model.erasure_(s) = erasure(from);
    for (Eigen::Index t = 0; t < k; ++t)
      model.transition_(s, t) = transition(from, static_cast<Eigen::Index>(order[t]));
  }
  model.labels_ = order;

  if (init) {
    model.initial_.resize(k);
    for (Eigen::Index s = 0; s < k; ++s)
      model.initial_(s) = (*init)(static_cast<Eigen::Index>(order[static_cast<std::size_t>(s)]));
  } else {
    model.initial_ = stationary_of(model.transition_);
  }
  return model;
}

ChannelModel gilbert_elliott(double erasure_rate, double decay, double eps_bad, double eps_good,
                             const std::optional<Vector>& init) {
  if (!(eps_bad > eps_good))
    throw Error(ErrorCode::BadParams, "bad state must erase more often than good state");
  // Average erasure rate r = pi_bad*eps_bad + (1-pi_bad)*eps_good.
  const double pi_bad = (erasure_rate - eps_good) / (eps_bad - eps_good);
  const double mix = 1.0 - decay;  // b12 + b21
  if (!(pi_bad > 0.0 && pi_bad < 1.0) || !(mix > 0.0 && mix <= 2.0))
    throw Error(ErrorCode::BadParams, "erasure rate or decay factor out of range");
  const double b21 = pi_bad * mix;  // good -> bad
  const double b12 = mix - b21;     // bad -> good
  Matrix b(2, 2);
  b << 1.0 - b12, b12, b21, 1.0 - b21;
  Vector eps(2);
  eps << eps_bad, eps_good;
  return validate_channel(b, eps, init);
}

Matrix chain_power(const ChannelModel& model, std::size_t n) {
  const auto k = static_cast<Eigen::Index>(model.states());
  Matrix result = Matrix::Identity(k, k);
  Matrix base = model.transition();
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

RowVector stationary_of(const Matrix& p) {
  const auto k = p.rows();
  // Solve pi (P - I) = 0 with one equation replaced by sum(pi) = 1.
  Matrix a = (p - Matrix::Identity(k, k)).transpose();
  a.row(k - 1).setOnes();
  Vector rhs = Vector::Zero(k);
  rhs(k - 1) = 1.0;
  Vector pi = a.fullPivLu().solve(rhs);
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return pi.transpose();
}

RowVector stationary_distribution(const ChannelModel& model) {
  return stationary_of(model.transition());
}

ErasureTensor::ErasureTensor(std::size_t states, std::size_t block_len)
    : k_(states), n_(block_len), probs_(states * states * (block_len + 1), 0.0) {}

Matrix ErasureTensor::marginal() const {
  return contract([](std::size_t) { return 1.0; });
}

std::vector<ErasureTensor> erasure_tensors(const ChannelModel& model, std::size_t block_len,
                                           std::size_t count) {
  if (block_len < 1) throw Error(ErrorCode::BadArgs, "block length must be >= 1");
  const std::size_t k = model.states();
  const std::size_t total = block_len * count;
  const std::size_t cap = total + 1;
  const Matrix& b = model.transition();
  const Vector& eps = model.erasure();

  // poly[(i*k + j)*cap + e] = coefficient of x^e in [B_x^n]_{ij}.
  std::vector<double> poly(k * k * cap, 0.0);
  std::vector<double> scaled(k * k * cap, 0.0);
  for (std::size_t i = 0; i < k; ++i) poly[(i * k + i) * cap] = 1.0;

  std::vector<ErasureTensor> out;
  out.reserve(count);
  for (std::size_t n = 0; n < total; ++n) {
    // Row l of B_x carries the factor (1 - eps_l + eps_l x): first weight
    // column l of the running product by it, then multiply by B.
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t l = 0; l < k; ++l) {
        const double keep = 1.0 - eps(static_cast<Eigen::Index>(l));
        const double lose = eps(static_cast<Eigen::Index>(l));
        const double* src = &poly[(i * k + l) * cap];
        double* dst = &scaled[(i * k + l) * cap];
        dst[0] = keep * src[0];
        for (std::size_t e = 1; e <= n + 1; ++e) dst[e] = keep * src[e] + lose * src[e - 1];
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        double* dst = &poly[(i * k + j) * cap];
        std::fill(dst, dst + n + 2, 0.0);
        for (std::size_t l = 0; l < k; ++l) {
          const double blj = b(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j));
          if (blj == 0.0) continue;
          const double* src = &scaled[(i * k + l) * cap];
          for (std::size_t e = 0; e <= n + 1; ++e) dst[e] += blj * src[e];
        }
      }
    }
    if ((n + 1) % block_len == 0) {
      ErasureTensor t(k, n + 1);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          for (std::size_t e = 0; e <= n + 1; ++e) t(i, j, e) = poly[(i * k + j) * cap + e];
      out.push_back(std::move(t));
    }
  }
  return out;
}

ErasureTensor erasure_tensor(const ChannelModel& model, std::size_t block_len) {
  return std::move(erasure_tensors(model, block_len, 1).front());
}

}  // namespace fpt
