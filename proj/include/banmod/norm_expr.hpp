#ifndef BANMOD_NORM_EXPR_HPP_
#define BANMOD_NORM_EXPR_HPP_

#include <memory>
#include <string>
#include <vector>

#include "banmod/linalg.hpp"

namespace banmod {

enum class PNorm { one, two, inf };

PNorm dual_index(PNorm p);
const char* to_string(PNorm p);

namespace detail {
struct NormImpl;
}

struct LpNode;
struct SupOfNode;
struct SumOfNode;
struct QuotientNode;
struct DualNode;
struct OpNormNode;
struct ComposeNode;

enum class NormKind { lp, sup_of, sum_of, quotient, dual, op_norm, compose };

// Immutable norm expression. Copies share the underlying tree.
class NormExpr {
 public:
  NormExpr();  // zero-dimensional norm
  explicit NormExpr(std::shared_ptr<const detail::NormImpl> impl) : impl_(std::move(impl)) {}

  Index dim() const;
  NormKind kind() const;

  const LpNode* as_lp() const;
  const SupOfNode* as_sup() const;
  const SumOfNode* as_sum() const;
  const QuotientNode* as_quotient() const;
  const DualNode* as_dual() const;
  const OpNormNode* as_op_norm() const;
  const ComposeNode* as_compose() const;

  const detail::NormImpl& impl() const { return *impl_; }
  bool same_node(const NormExpr& other) const { return impl_ == other.impl_; }

  friend bool operator==(const NormExpr& a, const NormExpr& b);
  friend bool operator!=(const NormExpr& a, const NormExpr& b) { return !(a == b); }

 private:
  std::shared_ptr<const detail::NormImpl> impl_;
};

struct LpNode {
  PNorm p;
  Vec weights;
};

struct NormPart {
  Index offset;
  NormExpr norm;
};

struct SupOfNode {
  std::vector<NormPart> parts;
};

struct SumOfNode {
  std::vector<NormPart> parts;
};

// Seminorm on the ambient coordinates: v -> inf_z ambient(v + basis z).
struct QuotientNode {
  NormExpr ambient;
  Mat basis;
};

struct DualNode {
  NormExpr inner;
};

// Norm on e x d matrices stored row-major as vectors of length e*d.
struct OpNormNode {
  NormExpr src;
  NormExpr tgt;
};

// x -> inner(embed x).
struct ComposeNode {
  Mat embed;
  NormExpr inner;
};

NormExpr lp(PNorm p, Vec weights);
NormExpr lp(PNorm p, Index dim);
NormExpr zero_norm();
NormExpr sup_of(std::vector<NormExpr> parts);
NormExpr sum_of(std::vector<NormExpr> parts);
NormExpr quotient_of(NormExpr ambient, Mat basis);
NormExpr dual_of(NormExpr inner);
NormExpr op_norm_of(NormExpr src, NormExpr tgt);
// `allow_seminorm` admits an embed without full column rank; the result is
// then only a seminorm.
NormExpr compose_linear(Mat embed, NormExpr inner, bool allow_seminorm = false);

// Leaves and single-part combinators of leaves: everything the randomized
// audits generate for diagram objects.
bool is_leaf(const NormExpr& n);

// Row-major flattening used by OpNormOf and the Hom modules.
Vec flatten_rowmajor(const Mat& a);
Mat unflatten_rowmajor(const Vec& v, Index rows, Index cols);

std::string describe(const NormExpr& n);

}  // namespace banmod

#endif  // BANMOD_NORM_EXPR_HPP_
