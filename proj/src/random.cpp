#include "banmod/random.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "banmod/error.hpp"
#include "banmod/limits.hpp"

namespace banmod {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Mat random_rank(Rng& rng, Index rows, Index cols, int rank_cap) {
  if (rank_cap < 0 || rows == 0 || cols == 0) return rng.mat(rows, cols);
  const Index r = std::min<Index>(rank_cap, std::min(rows, cols));
  return rng.mat(rows, r) * rng.mat(r, cols);
}

// Per-atom tree shape of a directed poset: parent[i] is the element covering
// i on its path to the top (the last element). The diamond case is handled by
// the callers.
struct TreeShape {
  std::vector<int> parent;
  bool diamond = false;
};

TreeShape random_tree(Rng& rng) {
  switch (rng.integer(0, 4)) {
    case 0: return {{-1}, false};
    case 1: return {{1, 2, -1}, false};          // chain 0 < 1 < 2
    case 2: return {{2, 2, -1}, false};          // two elements below a top
    case 3: return {{3, 3, 3, -1}, false};       // three below a top
    default: return {{1, 3, 3, -1}, true};       // diamond 0 < 1, 2 < 3, with 2 ~ 3
  }
}

std::vector<std::vector<bool>> order_of(const TreeShape& t) {
  const std::size_t n = t.parent.size();
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = static_cast<int>(i); j >= 0; j = t.parent[static_cast<std::size_t>(j)]) leq[i][static_cast<std::size_t>(j)] = true;
  }
  if (t.diamond) leq[0][2] = true;
  return leq;
}

// Maps phi_ij for every i <= j, built from random cover maps. The diamond
// element 2 carries the top's module with phi_23 = id and phi_02 = phi_13 phi_01.
std::map<std::pair<std::size_t, std::size_t>, Morphism> system_maps(Rng& rng, const TreeShape& t,
                                                                    std::vector<ModuleObj>& ms, const MeasureSpace& x,
                                                                    const RandomConfig& cfg) {
  const std::size_t n = t.parent.size();
  for (std::size_t i = 0; i < n; ++i) ms.push_back(random_module(rng, x, cfg));
  if (t.diamond) ms[2] = ms[3];
  std::map<std::pair<std::size_t, std::size_t>, Morphism> cover;
  for (std::size_t i = 0; i < n; ++i) {
    if (t.parent[i] < 0) continue;
    const auto j = static_cast<std::size_t>(t.parent[i]);
    if (t.diamond && i == 2) {
      cover.emplace(std::make_pair(i, j), Morphism::identity(ms[j]));
    } else {
      cover.emplace(std::make_pair(i, j), random_morphism(rng, ms[i], ms[j], rng.coin(0.3) ? rng.integer(0, 2) : -1));
    }
  }
  std::map<std::pair<std::size_t, std::size_t>, Morphism> all;
  for (std::size_t i = 0; i < n; ++i) {
    // Walk up from i composing cover maps.
    std::size_t cur = i;
    std::optional<Morphism> acc;
    while (t.parent[cur] >= 0) {
      const auto nxt = static_cast<std::size_t>(t.parent[cur]);
      const Morphism& step = cover.at({cur, nxt});
      acc = acc ? compose(step, *acc) : step;
      all.emplace(std::make_pair(i, nxt), *acc);
      cur = nxt;
    }
  }
  if (t.diamond) all.emplace(std::make_pair(std::size_t{0}, std::size_t{2}), all.at({0, 3}));
  return all;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix(splitmix(seed) ^ splitmix(index + 0x632be59bd9b4e019ULL));
}

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

int Rng::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

bool Rng::coin(double p) { return uniform(0.0, 1.0) < p; }

Mat Rng::mat(Index rows, Index cols) {
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = uniform(-1.0, 1.0);
  }
  return m;
}

Vec Rng::vec(Index n) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = uniform(-1.0, 1.0);
  return v;
}

MeasureSpace random_space(Rng& rng, const RandomConfig& cfg) {
  const int n = rng.integer(1, std::max(1, cfg.max_atoms));
  std::vector<Atom> atoms;
  for (int k = 0; k < n; ++k) atoms.push_back(Atom{"x" + std::to_string(k), rng.uniform(0.5, 2.0)});
  return MeasureSpace(std::move(atoms));
}

NormExpr random_leaf(Rng& rng, Index dim, const RandomConfig& cfg) {
  if (dim == 0) return NormExpr();
  const PNorm p = cfg.ps[static_cast<std::size_t>(rng.integer(0, static_cast<int>(cfg.ps.size()) - 1))];
  if (cfg.unit_weights) return lp(p, dim);
  Vec w(dim);
  for (Index i = 0; i < dim; ++i) w(i) = rng.uniform(0.5, 2.0);
  return lp(p, std::move(w));
}

ModuleObj random_module(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  std::vector<NormExpr> fibers;
  for (std::size_t a = 0; a < x.size(); ++a) fibers.push_back(random_leaf(rng, rng.integer(cfg.min_dim, cfg.max_dim), cfg));
  return ModuleObj(x, std::move(fibers));
}

Morphism random_morphism(Rng& rng, const ModuleObj& source, const ModuleObj& target, int rank_cap) {
  std::vector<Mat> mats;
  std::vector<NormBound> bounds;
  for (std::size_t a = 0; a < source.size(); ++a) {
    Mat m = random_rank(rng, target.dim(a), source.dim(a), rank_cap);
    const double factor = rng.uniform(0.5, 1.0);
    const OpNormResult r = op_norm(m, source.fiber(a), target.fiber(a));
    if (r.upper > 0.0) {
      const double s = factor / r.upper;
      m *= s;
      bounds.push_back(NormBound{r.lower * s, r.upper * s, r.exact});
    } else {
      bounds.push_back(NormBound{0.0, 0.0, r.exact});
    }
    mats.push_back(std::move(m));
  }
  return Morphism::trusted(source, target, std::move(mats), std::move(bounds));
}

Element random_element(Rng& rng, const ModuleObj& m) {
  std::vector<Vec> v;
  for (std::size_t a = 0; a < m.size(); ++a) v.push_back(rng.vec(m.dim(a)));
  return Element(m, std::move(v));
}

MeasMorphism random_meas_morphism(Rng& rng, const MeasureSpace& x, const MeasureSpace& y) {
  std::vector<std::size_t> map;
  for (std::size_t k = 0; k < x.size(); ++k) map.push_back(static_cast<std::size_t>(rng.integer(0, static_cast<int>(y.size()) - 1)));
  return MeasMorphism(x, y, std::move(map));
}

Diagram random_parallel_pair(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  const ModuleObj m = random_module(rng, x, cfg);
  const ModuleObj n = random_module(rng, x, cfg);
  const Morphism phi = random_morphism(rng, m, n, rng.coin(0.3) ? rng.integer(0, 2) : -1);
  const Morphism psi = rng.coin(0.1) ? phi : random_morphism(rng, m, n, rng.coin(0.3) ? rng.integer(0, 2) : -1);
  return parallel_pair_diagram(phi, psi);
}

Diagram random_discrete(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg, int max_objects) {
  const int k = rng.integer(1, std::max(1, max_objects));
  std::vector<ModuleObj> ms;
  for (int i = 0; i < k; ++i) ms.push_back(random_module(rng, x, cfg));
  return discrete_diagram(ms);
}

Diagram random_cospan(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  const ModuleObj m = random_module(rng, x, cfg);
  const ModuleObj n = random_module(rng, x, cfg);
  const ModuleObj q = random_module(rng, x, cfg);
  return cospan_diagram(random_morphism(rng, m, q, rng.coin(0.3) ? rng.integer(0, 2) : -1),
                        random_morphism(rng, n, q, rng.coin(0.3) ? rng.integer(0, 2) : -1));
}

Diagram random_span(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  const ModuleObj q = random_module(rng, x, cfg);
  const ModuleObj m = random_module(rng, x, cfg);
  const ModuleObj n = random_module(rng, x, cfg);
  return span_diagram(random_morphism(rng, q, m, rng.coin(0.3) ? rng.integer(0, 2) : -1),
                      random_morphism(rng, q, n, rng.coin(0.3) ? rng.integer(0, 2) : -1));
}

Diagram random_direct_system(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  const TreeShape t = random_tree(rng);
  std::vector<ModuleObj> ms;
  auto maps = system_maps(rng, t, ms, x, cfg);
  return direct_system(order_of(t), std::move(ms), maps);
}

Diagram random_inverse_system(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  // Same shapes with every map transposed in direction: P_ij : M_j -> M_i.
  const TreeShape t = random_tree(rng);
  const std::size_t n = t.parent.size();
  std::vector<ModuleObj> ms;
  for (std::size_t i = 0; i < n; ++i) ms.push_back(random_module(rng, x, cfg));
  if (t.diamond) ms[2] = ms[3];
  std::map<std::pair<std::size_t, std::size_t>, Morphism> cover;
  for (std::size_t i = 0; i < n; ++i) {
    if (t.parent[i] < 0) continue;
    const auto j = static_cast<std::size_t>(t.parent[i]);
    if (t.diamond && i == 2) {
      cover.emplace(std::make_pair(i, j), Morphism::identity(ms[j]));
    } else {
      cover.emplace(std::make_pair(i, j), random_morphism(rng, ms[j], ms[i], rng.coin(0.3) ? rng.integer(0, 2) : -1));
    }
  }
  std::map<std::pair<std::size_t, std::size_t>, Morphism> all;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i;
    std::optional<Morphism> acc;
    while (t.parent[cur] >= 0) {
      const auto nxt = static_cast<std::size_t>(t.parent[cur]);
      const Morphism& step = cover.at({cur, nxt});
      acc = acc ? compose(*acc, step) : step;
      all.emplace(std::make_pair(i, nxt), *acc);
      cur = nxt;
    }
  }
  if (t.diamond) all.emplace(std::make_pair(std::size_t{0}, std::size_t{2}), all.at({0, 3}));
  return inverse_system(order_of(t), std::move(ms), all);
}

Diagram random_diagram(Rng& rng, const MeasureSpace& x, const RandomConfig& cfg) {
  switch (rng.integer(0, 5)) {
    case 0: return random_parallel_pair(rng, x, cfg);
    case 1: return random_discrete(rng, x, cfg);
    case 2: return random_cospan(rng, x, cfg);
    case 3: return random_span(rng, x, cfg);
    case 4: return random_direct_system(rng, x, cfg);
    default: return random_inverse_system(rng, x, cfg);
  }
}

}  // namespace banmod
