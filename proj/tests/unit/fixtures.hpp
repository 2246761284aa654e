#pragma once

#include "fpt/arq_queue.hpp"
#include "fpt/channel.hpp"

namespace fixtures {

// Two-state bursty channel: bad state erases everything, good state nothing.
inline fpt::ChannelModel bursty(double decay = 0.9) {
  return fpt::gilbert_elliott(0.2, decay);
}

inline fpt::ChannelModel scalar(double eps) {
  return fpt::validate_channel(fpt::Matrix::Ones(1, 1), fpt::Vector::Constant(1, eps));
}

// One-state service blocks K = [kappa], M = [mu].
inline fpt::ServiceMatrices scalar_service(double kappa, double mu) {
  fpt::ServiceMatrices sm{fpt::Matrix::Constant(1, 1, kappa), fpt::Matrix::Constant(1, 1, mu),
                          scalar(0.0), fpt::CodeConfig{1, 1, 1}};
  return sm;
}

inline fpt::RowVector point_law() { return fpt::RowVector::Ones(1); }

}  // namespace fixtures
