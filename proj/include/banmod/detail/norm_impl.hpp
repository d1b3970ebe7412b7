#ifndef BANMOD_DETAIL_NORM_IMPL_HPP_
#define BANMOD_DETAIL_NORM_IMPL_HPP_

#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>

#include "banmod/norm_expr.hpp"

namespace banmod::detail {

// Small synchronized value cache. Entries are pure functions of their key, so
// hits and misses return identical results.
class Memo {
 public:
  bool lookup(const std::string& key, double& out) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(key);
    if (it == map_.end()) return false;
    out = it->second;
    return true;
  }

  void store(const std::string& key, double value) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (map_.size() >= kCapacity) map_.clear();
    map_.emplace(key, value);
  }

 private:
  static constexpr std::size_t kCapacity = 1 << 14;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, double> map_;
};

std::string memo_key(const Vec& v, double tol);

using NormNode =
    std::variant<LpNode, SupOfNode, SumOfNode, QuotientNode, DualNode, OpNormNode, ComposeNode>;

struct NormImpl {
  NormNode node;
  Index dim = 0;

  Memo memo;

  // Lazily computed rewrites. A canonical form equal to the node itself is
  // recorded by the flag only, so no node ever owns itself.
  mutable std::mutex lazy_mu;
  mutable bool canon_done = false;
  mutable bool canon_self = false;
  mutable std::optional<NormExpr> canon;
  mutable bool dual_done = false;
  mutable std::optional<NormExpr> dual;
};

}  // namespace banmod::detail

#endif  // BANMOD_DETAIL_NORM_IMPL_HPP_
