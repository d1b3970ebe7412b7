#include "banmod/norm_expr.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "banmod/detail/norm_impl.hpp"
#include "banmod/error.hpp"

namespace banmod {

namespace detail {

std::string memo_key(const Vec& v, double tol) {
  std::string key(sizeof(double) * static_cast<std::size_t>(v.size() + 1), '\0');
  std::memcpy(key.data(), v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  std::memcpy(key.data() + sizeof(double) * static_cast<std::size_t>(v.size()), &tol, sizeof(double));
  return key;
}

}  // namespace detail

namespace {

NormExpr make(detail::NormNode node, Index dim) {
  auto impl = std::make_shared<detail::NormImpl>();
  impl->node = std::move(node);
  impl->dim = dim;
  return NormExpr(std::shared_ptr<const detail::NormImpl>(std::move(impl)));
}

template <typename T>
const T* node_as(const NormExpr& n) {
  return std::get_if<T>(&n.impl().node);
}

bool same_matrix(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same_parts(const std::vector<NormPart>& a, const std::vector<NormPart>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].offset != b[i].offset || !(a[i].norm == b[i].norm)) return false;
  }
  return true;
}

std::vector<NormPart> stack_parts(std::vector<NormExpr> parts, Index& dim) {
  std::vector<NormPart> out;
  out.reserve(parts.size());
  dim = 0;
  for (NormExpr& p : parts) {
    const Index d = p.dim();
    out.push_back(NormPart{dim, std::move(p)});
    dim += d;
  }
  return out;
}

void check_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) fail(Errc::invalid_argument, std::string(what) + " has non-finite entries");
}

}  // namespace

PNorm dual_index(PNorm p) {
  switch (p) {
    case PNorm::one: return PNorm::inf;
    case PNorm::two: return PNorm::two;
    case PNorm::inf: return PNorm::one;
  }
  return PNorm::two;
}

const char* to_string(PNorm p) {
  switch (p) {
    case PNorm::one: return "1";
    case PNorm::two: return "2";
    case PNorm::inf: return "inf";
  }
  return "?";
}

NormExpr::NormExpr() : NormExpr(lp(PNorm::inf, Vec())) {}

Index NormExpr::dim() const { return impl_->dim; }

NormKind NormExpr::kind() const { return static_cast<NormKind>(impl_->node.index()); }

const LpNode* NormExpr::as_lp() const { return node_as<LpNode>(*this); }
const SupOfNode* NormExpr::as_sup() const { return node_as<SupOfNode>(*this); }
const SumOfNode* NormExpr::as_sum() const { return node_as<SumOfNode>(*this); }
const QuotientNode* NormExpr::as_quotient() const { return node_as<QuotientNode>(*this); }
const DualNode* NormExpr::as_dual() const { return node_as<DualNode>(*this); }
const OpNormNode* NormExpr::as_op_norm() const { return node_as<OpNormNode>(*this); }
const ComposeNode* NormExpr::as_compose() const { return node_as<ComposeNode>(*this); }

bool operator==(const NormExpr& a, const NormExpr& b) {
  if (a.same_node(b)) return true;
  if (a.kind() != b.kind() || a.dim() != b.dim()) return false;
  switch (a.kind()) {
    case NormKind::lp:
      return a.as_lp()->p == b.as_lp()->p && a.as_lp()->weights == b.as_lp()->weights;
    case NormKind::sup_of: return same_parts(a.as_sup()->parts, b.as_sup()->parts);
    case NormKind::sum_of: return same_parts(a.as_sum()->parts, b.as_sum()->parts);
    case NormKind::quotient:
      return same_matrix(a.as_quotient()->basis, b.as_quotient()->basis) &&
             a.as_quotient()->ambient == b.as_quotient()->ambient;
    case NormKind::dual: return a.as_dual()->inner == b.as_dual()->inner;
    case NormKind::op_norm:
      return a.as_op_norm()->src == b.as_op_norm()->src && a.as_op_norm()->tgt == b.as_op_norm()->tgt;
    case NormKind::compose:
      return same_matrix(a.as_compose()->embed, b.as_compose()->embed) &&
             a.as_compose()->inner == b.as_compose()->inner;
  }
  return false;
}

NormExpr lp(PNorm p, Vec weights) {
  for (Index i = 0; i < weights.size(); ++i) {
    if (!(weights(i) > 0.0) || !std::isfinite(weights(i))) {
      fail(Errc::invalid_argument, "lp weights must be positive and finite");
    }
  }
  const Index d = weights.size();
  return make(LpNode{p, std::move(weights)}, d);
}

NormExpr lp(PNorm p, Index dim) { return lp(p, Vec::Ones(dim)); }

NormExpr zero_norm() { return lp(PNorm::inf, Vec()); }

NormExpr sup_of(std::vector<NormExpr> parts) {
  Index dim = 0;
  auto stacked = stack_parts(std::move(parts), dim);
  return make(SupOfNode{std::move(stacked)}, dim);
}

NormExpr sum_of(std::vector<NormExpr> parts) {
  Index dim = 0;
  auto stacked = stack_parts(std::move(parts), dim);
  return make(SumOfNode{std::move(stacked)}, dim);
}

NormExpr quotient_of(NormExpr ambient, Mat basis) {
  if (basis.rows() != ambient.dim()) {
    fail(Errc::dimension_mismatch, "quotient basis rows must equal the ambient dimension");
  }
  check_finite(basis, "quotient basis");
  if (basis.cols() > 0 && !has_full_column_rank(basis)) {
    fail(Errc::rank_deficient, "quotient basis columns are dependent");
  }
  const Index d = ambient.dim();
  return make(QuotientNode{std::move(ambient), std::move(basis)}, d);
}

NormExpr dual_of(NormExpr inner) {
  const Index d = inner.dim();
  return make(DualNode{std::move(inner)}, d);
}

NormExpr op_norm_of(NormExpr src, NormExpr tgt) {
  const Index d = src.dim() * tgt.dim();
  return make(OpNormNode{std::move(src), std::move(tgt)}, d);
}

NormExpr compose_linear(Mat embed, NormExpr inner, bool allow_seminorm) {
  if (embed.rows() != inner.dim()) {
    fail(Errc::dimension_mismatch, "compose_linear: embed rows must equal the inner dimension");
  }
  check_finite(embed, "compose_linear embed");
  if (!allow_seminorm && embed.cols() > 0 && !has_full_column_rank(embed)) {
    fail(Errc::rank_deficient, "compose_linear: embed must have full column rank");
  }
  const Index d = embed.cols();
  return make(ComposeNode{std::move(embed), std::move(inner)}, d);
}

bool is_leaf(const NormExpr& n) { return n.kind() == NormKind::lp; }

Vec flatten_rowmajor(const Mat& a) {
  Vec v(a.size());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  }
  return v;
}

Mat unflatten_rowmajor(const Vec& v, Index rows, Index cols) {
  if (v.size() != rows * cols) fail(Errc::dimension_mismatch, "unflatten_rowmajor");
  Mat a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) a(i, j) = v(i * cols + j);
  }
  return a;
}

namespace {

void describe_into(const NormExpr& n, std::ostringstream& os) {
  switch (n.kind()) {
    case NormKind::lp: {
      const LpNode& l = *n.as_lp();
      os << "l" << to_string(l.p) << "[" << l.weights.size();
      if (!l.weights.isOnes()) os << ",weighted";
      os << "]";
      return;
    }
    case NormKind::sup_of:
    case NormKind::sum_of: {
      const auto& parts = n.kind() == NormKind::sup_of ? n.as_sup()->parts : n.as_sum()->parts;
      os << (n.kind() == NormKind::sup_of ? "sup(" : "sum(");
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) os << ",";
        describe_into(parts[i].norm, os);
      }
      os << ")";
      return;
    }
    case NormKind::quotient:
      os << "quot(";
      describe_into(n.as_quotient()->ambient, os);
      os << "/" << n.as_quotient()->basis.cols() << ")";
      return;
    case NormKind::dual:
      os << "dual(";
      describe_into(n.as_dual()->inner, os);
      os << ")";
      return;
    case NormKind::op_norm:
      os << "op(";
      describe_into(n.as_op_norm()->src, os);
      os << "->";
      describe_into(n.as_op_norm()->tgt, os);
      os << ")";
      return;
    case NormKind::compose:
      os << "lin" << n.as_compose()->embed.rows() << "x" << n.as_compose()->embed.cols() << "(";
      describe_into(n.as_compose()->inner, os);
      os << ")";
      return;
  }
}

}  // namespace

std::string describe(const NormExpr& n) {
  std::ostringstream os;
  describe_into(n, os);
  return os.str();
}

}  // namespace banmod
