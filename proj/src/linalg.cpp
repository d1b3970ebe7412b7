#include "banmod/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "banmod/error.hpp"

namespace banmod {

namespace {

void normalize_signs(Mat& basis) {
  for (Index j = 0; j < basis.cols(); ++j) {
    Index arg = 0;
    basis.col(j).cwiseAbs().maxCoeff(&arg);
    if (basis(arg, j) < 0) basis.col(j) = -basis.col(j);
  }
}

}  // namespace

double max_abs(const Mat& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double rank_threshold(const Mat& a) {
  const double scale = std::max<double>(1.0, max_abs(a));
  return kRankRelTol * scale * static_cast<double>(std::max<Index>(1, std::max(a.rows(), a.cols())));
}

Index numerical_rank(const Mat& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const double thresh = rank_threshold(a);
  Index rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > thresh) ++rank;
  }
  return rank;
}

bool has_full_column_rank(const Mat& a) { return numerical_rank(a) == a.cols(); }
bool has_full_row_rank(const Mat& a) { return numerical_rank(a) == a.rows(); }

Mat null_space(const Mat& a) {
  const Index n = a.cols();
  if (n == 0) return Mat(0, 0);
  if (a.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const double thresh = rank_threshold(a);
  Index rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > thresh) ++rank;
  }
  Mat basis = svd.matrixV().rightCols(n - rank);
  normalize_signs(basis);
  return basis;
}

Mat column_space(const Mat& a) {
  const Index m = a.rows();
  if (a.cols() == 0 || m == 0) return Mat(m, 0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU);
  const double thresh = rank_threshold(a);
  Index rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > thresh) ++rank;
  }
  Mat basis = svd.matrixU().leftCols(rank);
  normalize_signs(basis);
  return basis;
}

Mat least_squares(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) {
    fail(Errc::dimension_mismatch, "least_squares: row counts differ");
  }
  if (a.cols() == 0) return Mat(0, b.cols());
  if (a.rows() == 0) return Mat::Zero(a.cols(), b.cols());
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
  cod.setThreshold(kRankRelTol);
  return cod.solve(b);
}

Mat pseudo_inverse(const Mat& a) {
  return least_squares(a, Mat::Identity(a.rows(), a.rows()));
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Mat selection(Index n, const std::vector<Index>& coords) {
  Mat s = Mat::Zero(n, static_cast<Index>(coords.size()));
  for (std::size_t j = 0; j < coords.size(); ++j) {
    s(coords[j], static_cast<Index>(j)) = 1.0;
  }
  return s;
}

Complement complement_coordinates(const Mat& basis, Index n) {
  if (basis.rows() != n) {
    fail(Errc::dimension_mismatch, "complement_coordinates: basis has wrong row count");
  }
  Complement out;
  const Index r = basis.cols();
  if (r == 0) {
    out.coords.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) out.coords[static_cast<std::size_t>(i)] = i;
    out.lift = Mat::Identity(n, n);
    out.proj = Mat::Identity(n, n);
    return out;
  }
  if (!has_full_column_rank(basis)) {
    fail(Errc::rank_deficient, "complement_coordinates: basis columns are dependent");
  }
  Eigen::ColPivHouseholderQR<Mat> qr(basis.transpose());
  std::vector<bool> pivot(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < r; ++i) {
    pivot[static_cast<std::size_t>(qr.colsPermutation().indices()(i))] = true;
  }
  for (Index i = 0; i < n; ++i) {
    if (!pivot[static_cast<std::size_t>(i)]) out.coords.push_back(i);
  }
  const Index k = n - r;
  out.lift = selection(n, out.coords);
  Mat full(n, n);
  full << out.lift, basis;
  Mat inv = full.partialPivLu().inverse();
  out.proj = inv.topRows(k);
  return out;
}

Mat block_diagonal(const std::vector<Mat>& blocks) {
  Index rows = 0;
  Index cols = 0;
  for (const Mat& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Mat out = Mat::Zero(rows, cols);
  Index r = 0;
  Index c = 0;
  for (const Mat& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

}  // namespace banmod
