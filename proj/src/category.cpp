#include "banmod/category.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "banmod/error.hpp"

namespace banmod {

namespace {

constexpr double kFunctorTol = 1e-12;

}  // namespace

double max_entry_diff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

FiniteCategory::FiniteCategory(std::vector<std::string> objects, std::vector<IndexArrow> arrows,
                               const std::map<std::pair<std::size_t, std::size_t>, std::size_t>& compose)
    : objects_(std::move(objects)) {
  const std::size_t n = objects_.size();
  if (n == 0) fail(Errc::invalid_diagram, "index category needs at least one object");
  for (std::size_t k = 0; k < n; ++k) arrows_.push_back(IndexArrow{"id_" + objects_[k], k, k});
  for (const IndexArrow& a : arrows) {
    if (a.dom >= n || a.cod >= n) fail(Errc::invalid_diagram, "arrow " + a.id + " has an unknown endpoint");
    arrows_.push_back(a);
  }
  const std::size_t m = arrows_.size();
  table_.assign(m, std::vector<long>(m, -1));
  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t f = 0; f < m; ++f) {
      if (arrows_[f].cod != arrows_[g].dom) continue;
      if (g < n) {
        table_[g][f] = static_cast<long>(f);
      } else if (f < n) {
        table_[g][f] = static_cast<long>(g);
      } else {
        auto it = compose.find({g - n, f - n});
        if (it == compose.end()) {
          fail(Errc::invalid_diagram, "composition " + arrows_[g].id + " o " + arrows_[f].id + " is missing");
        }
        std::size_t res = 0;
        if (it->second == FiniteCategory::kIdentity) {
          if (arrows_[f].dom != arrows_[g].cod) fail(Errc::invalid_diagram, "identity result needs a loop");
          res = arrows_[f].dom;
        } else if (it->second < arrows.size()) {
          res = it->second + n;
        } else {
          fail(Errc::invalid_diagram, "composition result out of range");
        }
        if (arrows_[res].dom != arrows_[f].dom || arrows_[res].cod != arrows_[g].cod) {
          fail(Errc::invalid_diagram, "composition " + arrows_[g].id + " o " + arrows_[f].id + " has wrong endpoints");
        }
        table_[g][f] = static_cast<long>(res);
      }
    }
  }
  for (const auto& entry : compose) {
    const auto& key = entry.first;
    const std::size_t g = key.first + n, f = key.second + n;
    if (g >= m || f >= m || arrows_[f].cod != arrows_[g].dom) {
      fail(Errc::invalid_diagram, "composition table names a non-composable pair");
    }
  }
  // Associativity.
  for (std::size_t h = 0; h < m; ++h) {
    for (std::size_t g = 0; g < m; ++g) {
      if (table_[h][g] < 0) continue;
      for (std::size_t f = 0; f < m; ++f) {
        if (table_[g][f] < 0) continue;
        const long left = table_[static_cast<std::size_t>(table_[h][g])][f];
        const long right = table_[h][static_cast<std::size_t>(table_[g][f])];
        if (left != right) fail(Errc::invalid_diagram, "composition is not associative");
      }
    }
  }
}

FiniteCategory FiniteCategory::discrete(std::size_t n) {
  std::vector<std::string> objs;
  for (std::size_t k = 0; k < n; ++k) objs.push_back("o" + std::to_string(k));
  return FiniteCategory(std::move(objs), {}, {});
}

FiniteCategory FiniteCategory::parallel_pair() {
  return FiniteCategory({"src", "tgt"}, {IndexArrow{"a", 0, 1}, IndexArrow{"b", 0, 1}}, {});
}

FiniteCategory FiniteCategory::cospan() {
  return FiniteCategory({"m", "n", "q"}, {IndexArrow{"f", 0, 2}, IndexArrow{"g", 1, 2}}, {});
}

FiniteCategory FiniteCategory::span() {
  return FiniteCategory({"q", "m", "n"}, {IndexArrow{"f", 0, 1}, IndexArrow{"g", 0, 2}}, {});
}

FiniteCategory FiniteCategory::poset(const std::vector<std::vector<bool>>& leq) {
  const std::size_t n = leq.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (leq[i].size() != n) fail(Errc::invalid_diagram, "order relation must be square");
    if (!leq[i][i]) fail(Errc::invalid_diagram, "order relation must be reflexive");
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && leq[i][j] && leq[j][i]) fail(Errc::invalid_diagram, "order relation must be antisymmetric");
      for (std::size_t k = 0; k < n; ++k) {
        if (leq[i][j] && leq[j][k] && !leq[i][k]) fail(Errc::invalid_diagram, "order relation must be transitive");
      }
    }
  }
  std::vector<std::string> objs;
  for (std::size_t k = 0; k < n; ++k) objs.push_back(std::to_string(k));
  std::vector<IndexArrow> arrows;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> where;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && leq[i][j]) {
        where[{i, j}] = arrows.size();
        arrows.push_back(IndexArrow{std::to_string(i) + "<" + std::to_string(j), i, j});
      }
    }
  }
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> comp;
  for (std::size_t f = 0; f < arrows.size(); ++f) {
    for (std::size_t g = 0; g < arrows.size(); ++g) {
      if (arrows[f].cod != arrows[g].dom) continue;
      comp[{g, f}] = where.at({arrows[f].dom, arrows[g].cod});
    }
  }
  return FiniteCategory(std::move(objs), std::move(arrows), comp);
}

std::optional<std::size_t> FiniteCategory::compose(std::size_t g, std::size_t f) const {
  const long r = table_[g][f];
  if (r < 0) return std::nullopt;
  return static_cast<std::size_t>(r);
}

std::vector<std::size_t> FiniteCategory::hom(std::size_t a, std::size_t b) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < arrows_.size(); ++k) {
    if (arrows_[k].dom == a && arrows_[k].cod == b) out.push_back(k);
  }
  return out;
}

bool FiniteCategory::is_thin() const {
  for (std::size_t a = 0; a < objects_.size(); ++a) {
    for (std::size_t b = 0; b < objects_.size(); ++b) {
      if (hom(a, b).size() > 1) return false;
    }
  }
  return true;
}

Diagram::Diagram(FiniteCategory index, std::vector<ModuleObj> objects, std::vector<Morphism> arrows)
    : index_(std::move(index)), objects_(std::move(objects)) {
  const std::size_t n = index_.num_objects();
  if (objects_.size() != n) fail(Errc::invalid_diagram, "one module per index object expected");
  if (arrows.size() != index_.num_arrows() - n) fail(Errc::invalid_diagram, "one morphism per non-identity arrow expected");
  for (const ModuleObj& m : objects_) {
    if (!(m.space() == objects_.front().space())) fail(Errc::space_mismatch, "diagram objects over different spaces");
  }
  for (std::size_t k = 0; k < n; ++k) maps_.push_back(Morphism::identity(objects_[k]));
  for (std::size_t k = 0; k < arrows.size(); ++k) {
    const IndexArrow& a = index_.arrow(k + n);
    if (arrows[k].source() != objects_[a.dom] || arrows[k].target() != objects_[a.cod]) {
      fail(Errc::invalid_diagram, "morphism for arrow " + a.id + " has the wrong endpoints");
    }
    maps_.push_back(std::move(arrows[k]));
  }
  const double r = functoriality_residual();
  if (r > kFunctorTol) {
    fail(Errc::invalid_diagram, "diagram is not functorial (residual " + std::to_string(r) + ")");
  }
}

double Diagram::functoriality_residual() const {
  double worst = 0.0;
  const std::size_t m = index_.num_arrows();
  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t f = 0; f < m; ++f) {
      auto h = index_.compose(g, f);
      if (!h) continue;
      for (std::size_t a = 0; a < space().size(); ++a) {
        const Mat& mg = maps_[g].mat(a);
        const Mat& mf = maps_[f].mat(a);
        const double scale = std::max(1.0, max_abs(mg) * max_abs(mf) * static_cast<double>(std::max<Index>(1, mg.cols())));
        worst = std::max(worst, max_entry_diff(mg * mf, maps_[*h].mat(a)) / scale);
      }
    }
  }
  return worst;
}

double cone_residual(const Diagram& d, const Cone& c) {
  if (c.legs.size() != d.index().num_objects()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t k = 0; k < d.index().num_arrows(); ++k) {
    const IndexArrow& a = d.index().arrow(k);
    for (std::size_t x = 0; x < d.space().size(); ++x) {
      worst = std::max(worst, max_entry_diff(d.map(k).mat(x) * c.legs[a.dom].mat(x), c.legs[a.cod].mat(x)));
    }
  }
  return worst;
}

double cocone_residual(const Diagram& d, const Cocone& c) {
  if (c.legs.size() != d.index().num_objects()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t k = 0; k < d.index().num_arrows(); ++k) {
    const IndexArrow& a = d.index().arrow(k);
    for (std::size_t x = 0; x < d.space().size(); ++x) {
      worst = std::max(worst, max_entry_diff(c.legs[a.cod].mat(x) * d.map(k).mat(x), c.legs[a.dom].mat(x)));
    }
  }
  return worst;
}

}  // namespace banmod
