#pragma once

#include <random>

#include <Eigen/Dense>

#include "grasswig/grassmann.hpp"

namespace grasswig::testing {

// Dense random element: every monomial allowed by `keep` gets a Gaussian
// complex coefficient.
template <class Rng, class Keep>
Element random_element(Algebra alg, Rng& rng, Keep keep) {
  std::normal_distribution<double> nd;
  Element e(alg);
  for (uint64_t m = 0; m <= alg.full_mask(); ++m)
    if ((m & ~alg.full_mask()) == 0 && keep(m)) e.accumulate(m, cplx(nd(rng), nd(rng)));
  e.prune();
  return e;
}

template <class Rng>
Element random_element(Algebra alg, Rng& rng) {
  return random_element(alg, rng, [](uint64_t) { return true; });
}

template <class Rng>
Eigen::MatrixXd random_antisymmetric(int m, Rng& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      a(i, j) = nd(rng);
      a(j, i) = -a(i, j);
    }
  return a;
}

}  // namespace grasswig::testing
