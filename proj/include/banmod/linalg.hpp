#ifndef BANMOD_LINALG_HPP_
#define BANMOD_LINALG_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace banmod {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Relative threshold used for every rank decision in the library.
inline constexpr double kRankRelTol = 1e-10;

double max_abs(const Mat& a);
double rank_threshold(const Mat& a);
Index numerical_rank(const Mat& a);
bool has_full_column_rank(const Mat& a);
bool has_full_row_rank(const Mat& a);

// Orthonormal basis of {v : a v = 0}. Each column is sign-normalized so that
// its largest-magnitude entry is positive.
Mat null_space(const Mat& a);

// Orthonormal basis of the column space of `a`, sign-normalized as above.
Mat column_space(const Mat& a);

// Minimum-norm least-squares solution of a x = b (complete orthogonal
// decomposition). Works for any shape and rank.
Mat least_squares(const Mat& a, const Mat& b);
Mat pseudo_inverse(const Mat& a);

// Kronecker product a (x) b.
Mat kron(const Mat& a, const Mat& b);

// Complement coordinates to span(basis) inside R^n, chosen by pivoted
// elimination on the rows of `basis`: `coords` are the non-pivot rows,
// `lift` = E_coords (n x k) and `proj` (k x n) satisfies proj * lift = I,
// proj * basis = 0.
struct Complement {
  std::vector<Index> coords;
  Mat lift;
  Mat proj;
};
Complement complement_coordinates(const Mat& basis, Index n);

// Columns of the identity selected by `coords`.
Mat selection(Index n, const std::vector<Index>& coords);

// Block-diagonal matrix from the given blocks.
Mat block_diagonal(const std::vector<Mat>& blocks);

}  // namespace banmod

#endif  // BANMOD_LINALG_HPP_
