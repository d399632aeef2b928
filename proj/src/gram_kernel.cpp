#include "hdcov/gram_kernel.hpp"

namespace hdcov {

namespace {

// Upper triangle only, mirrored, so the result is exactly symmetric.
Matrix symmetric_squared_gram(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix inner(n, n);
  inner.setZero();
  inner.selfadjointView<Eigen::Upper>().rankUpdate(a);
  Matrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = inner(i, j) * inner(i, j);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

}  // namespace

Matrix induced_gram(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "gram blocks need samples of equal dimension");
  }
  Matrix g = a * b.transpose();
  return g.array().square().matrix();
}

GramBlocks induced_gram(const SampleBlock& x, const SampleBlock& y) {
  if (x.p() != y.p()) {
    throw Error(ErrorCode::DimensionMismatch,
                "gram blocks need samples of equal dimension");
  }
  GramBlocks g;
  g.g11 = symmetric_squared_gram(x.data());
  g.g22 = symmetric_squared_gram(y.data());
  g.g12 = induced_gram(x.data(), y.data());
  return g;
}

Matrix double_center(const Matrix& block) {
  const Eigen::VectorXd row_mean = block.rowwise().mean();
  const Eigen::RowVectorXd col_mean = block.colwise().mean();
  const double grand = block.mean();
  Matrix c = block;
  c.colwise() -= row_mean;
  c.rowwise() -= col_mean;
  c.array() += grand;
  return c;
}

CenteredGramBlocks double_center(const GramBlocks& g) {
  CenteredGramBlocks c;
  c.c11 = double_center(g.g11);
  c.c12 = double_center(g.g12);
  c.c22 = double_center(g.g22);
  // Rounding in the four-term form can leave c11/c22 asymmetric in the last
  // bit; symmetrize so downstream traces see an exactly symmetric matrix.
  c.c11 = 0.5 * (c.c11 + c.c11.transpose());
  c.c22 = 0.5 * (c.c22 + c.c22.transpose());
  return c;
}

}  // namespace hdcov
