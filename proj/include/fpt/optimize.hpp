#pragma once

#include <cmath>

namespace fpt {

struct Maximum {
  double arg;
  double value;
};

/// Golden-section search for the maximizer of a unimodal function on
/// [lo, hi], stopped once the bracket is narrower than `width`.
template <typename F>
Maximum golden_section_max(F&& f, double lo, double hi, double width = 1e-10) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > width) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    // Bracket no longer shrinks in floating point.
    if (c == d) break;
  }
  return fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
}

}  // namespace fpt
