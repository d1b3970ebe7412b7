#ifndef BANMOD_TESTS_SUPPORT_HPP_
#define BANMOD_TESTS_SUPPORT_HPP_

#include <initializer_list>
#include <random>

#include "banmod/linalg.hpp"

namespace testing_support {

using banmod::Index;
using banmod::Mat;
using banmod::Vec;

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

struct Rng {
  explicit Rng(unsigned long long seed) : gen(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  Vec vec(Index n, double scale = 1.0) {
    Vec v(n);
    for (Index i = 0; i < n; ++i) v(i) = uniform(-scale, scale);
    return v;
  }
  Mat mat(Index r, Index c, double scale = 1.0) {
    Mat m(r, c);
    for (Index i = 0; i < r; ++i) {
      for (Index j = 0; j < c; ++j) m(i, j) = uniform(-scale, scale);
    }
    return m;
  }
  Vec weights(Index n) {
    Vec w(n);
    for (Index i = 0; i < n; ++i) w(i) = uniform(0.5, 2.0);
    return w;
  }

  std::mt19937_64 gen;
};

}  // namespace testing_support

#endif  // BANMOD_TESTS_SUPPORT_HPP_
