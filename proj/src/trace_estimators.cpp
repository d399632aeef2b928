#include "hdcov/trace_estimators.hpp"

#include <sstream>

namespace hdcov {

namespace {

const Matrix& block(const CenteredGramBlocks& c, Group i) {
  return i == Group::First ? c.c11 : c.c22;
}

double size_of(const CenteredGramBlocks& c, Group i) {
  return static_cast<double>(i == Group::First ? c.n1() : c.n2());
}

void require_min_size(double n, double minimum, ErrorCode code) {
  if (n < minimum) {
    std::ostringstream msg;
    msg << "group size " << n << " is below the minimum of " << minimum
        << " for this estimator";
    throw Error(code, msg.str());
  }
}

// tr(A^3) for symmetric A as the entrywise sum of (A A) o A'.
double trace_cubed(const Matrix& a) {
  const Matrix sq = a * a;
  return sq.cwiseProduct(a.transpose()).sum();
}

}  // namespace

double tr_omega_i(const CenteredGramBlocks& c, Group i) {
  return block(c, i).trace() / (size_of(c, i) - 1.0);
}

double tr_omega_i_sq_plugin(const CenteredGramBlocks& c, Group i) {
  const double m = size_of(c, i) - 1.0;
  return block(c, i).squaredNorm() / (m * m);
}

double tr_omega_i_cu_plugin(const CenteredGramBlocks& c, Group i) {
  const double m = size_of(c, i) - 1.0;
  return trace_cubed(block(c, i)) / (m * m * m);
}

double tr_omega_sq_cross_plugin(const CenteredGramBlocks& c, Group squared) {
  const double m1 = static_cast<double>(c.n1()) - 1.0;
  const double m2 = static_cast<double>(c.n2()) - 1.0;
  if (squared == Group::First) {
    // tr(c11 c12 c12')
    const Matrix outer = c.c12 * c.c12.transpose();
    return outer.cwiseProduct(c.c11).sum() / (m1 * m1 * m2);
  }
  // tr(c12 c22 c12') = tr(c22 c12' c12)
  const Matrix inner = c.c12.transpose() * c.c12;
  return inner.cwiseProduct(c.c22).sum() / (m1 * m2 * m2);
}

double tr_omega_i_sq_hat(const CenteredGramBlocks& c, Group i) {
  const double n = size_of(c, i);
  require_min_size(n, 3.0, ErrorCode::DegenerateSampleSize);
  const double tr1 = tr_omega_i(c, i);
  const double tr2 = tr_omega_i_sq_plugin(c, i);
  const double factor = (n - 1.0) * (n - 1.0) / ((n - 2.0) * (n + 1.0));
  return factor * (tr2 - tr1 * tr1 / (n - 1.0));
}

double tr_omega12_hat(const CenteredGramBlocks& c) {
  const double m1 = static_cast<double>(c.n1()) - 1.0;
  const double m2 = static_cast<double>(c.n2()) - 1.0;
  return c.c12.squaredNorm() / (m1 * m2);
}

double tr_omega_i_cu_hat(const CenteredGramBlocks& c, Group i) {
  const double n = size_of(c, i);
  require_min_size(n, 4.0, ErrorCode::DegenerateSampleSize);
  const double tr1 = tr_omega_i(c, i);
  const double tr2 = tr_omega_i_sq_plugin(c, i);
  const double tr3 = tr_omega_i_cu_plugin(c, i);
  const double m = n - 1.0;
  const double factor =
      m * m * m * m / ((n * n + n - 6.0) * (n * n - 2.0 * n - 3.0));
  return factor * (tr3 - 3.0 * tr1 * tr2 / m + 2.0 * tr1 * tr1 * tr1 / (m * m));
}

double tr_omega_sq_cross_hat(const CenteredGramBlocks& c, Group squared) {
  const double n = size_of(c, squared);
  require_min_size(n, 3.0, ErrorCode::DegenerateSampleSize);
  const double m = n - 1.0;
  const double cross = tr_omega12_hat(c);
  const double plugin = tr_omega_sq_cross_plugin(c, squared);
  return m / ((n - 2.0) * (n + 1.0)) *
         (m * plugin - cross * tr_omega_i(c, squared));
}

CumulantEstimates cumulants_hat(const CenteredGramBlocks& c) {
  const double n1 = static_cast<double>(c.n1());
  const double n2 = static_cast<double>(c.n2());
  require_min_size(n1, 4.0, ErrorCode::DegenerateSampleSize);
  require_min_size(n2, 4.0, ErrorCode::DegenerateSampleSize);

  CumulantEstimates e;
  e.n1 = c.n1();
  e.n2 = c.n2();
  e.tr_o1sq = tr_omega_i_sq_hat(c, Group::First);
  e.tr_o2sq = tr_omega_i_sq_hat(c, Group::Second);
  e.tr_o1o2 = tr_omega12_hat(c);
  e.tr_o1cu = tr_omega_i_cu_hat(c, Group::First);
  e.tr_o2cu = tr_omega_i_cu_hat(c, Group::Second);
  e.tr_o1sq_o2 = tr_omega_sq_cross_hat(c, Group::First);
  e.tr_o1_o2sq = tr_omega_sq_cross_hat(c, Group::Second);
  e.k2_hat = k2_from_traces(e.tr_o1sq, e.tr_o1o2, e.tr_o2sq, n1, n2);
  e.k3_hat = k3_from_traces(e.tr_o1cu, e.tr_o1sq_o2, e.tr_o1_o2sq, e.tr_o2cu,
                            n1, n2);
  return e;
}

}  // namespace hdcov
