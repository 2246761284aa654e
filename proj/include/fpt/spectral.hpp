#pragma once

#include "fpt/types.hpp"

#include <cstddef>
#include <vector>

namespace fpt {

/// Perron root of a nonnegative square matrix.
///
/// Each strongly connected class is handled by power iteration, stopped when
/// the Collatz-Wielandt bracket min_i (Ax)_i/x_i <= rho <= max_i (Ax)_i/x_i
/// is narrower than `rel_tol` relative; periodic classes are shifted by
/// their row-sum norm first. The result is the maximum over classes.
double spectral_radius(const Matrix& a, double rel_tol = 1e-13);

/// Strongly connected classes of the sparsity graph of `a`.
std::vector<std::vector<std::size_t>> strong_components(const Matrix& a);

/// True when the sparsity graph of `a` is strongly connected.
bool is_irreducible(const Matrix& a);

}  // namespace fpt
