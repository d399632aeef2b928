#pragma once

// Inner products of the induced samples w = y (x) y, computed as (y_a' y_b)^2
// so the p^2-dimensional vectors are never formed.

#include "hdcov/core_model.hpp"

namespace hdcov {

struct GramBlocks {
  Matrix g11;  // n1 x n1, symmetric
  Matrix g12;  // n1 x n2
  Matrix g22;  // n2 x n2, symmetric

  Eigen::Index n1() const noexcept { return g11.rows(); }
  Eigen::Index n2() const noexcept { return g22.rows(); }
};

/// Blocks H_a G_ab H_b with H_m = I - 11'/m. Equal to W_ac' W_bc for the
/// group-centered induced data.
struct CenteredGramBlocks {
  Matrix c11;
  Matrix c12;
  Matrix c22;

  Eigen::Index n1() const noexcept { return c11.rows(); }
  Eigen::Index n2() const noexcept { return c22.rows(); }
};

/// Squared-inner-product Gram blocks of the two samples. Cost O((n1+n2)^2 p).
GramBlocks induced_gram(const SampleBlock& x, const SampleBlock& y);

/// Single-block variant, used where only one group is needed.
Matrix induced_gram(const Matrix& a, const Matrix& b);

/// Double centering: subtract row means and column means, add back the grand
/// mean. Applied independently to each block.
CenteredGramBlocks double_center(const GramBlocks& g);

Matrix double_center(const Matrix& block);

}  // namespace hdcov
