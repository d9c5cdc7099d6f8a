#pragma once

#include <vector>

#include "ncerg/algebra.hpp"
#include "ncerg/rng.hpp"

namespace testing {

using namespace ncerg;

inline std::vector<AlgebraPtr> sample_algebras() {
  return {
      make_algebra(AlgebraSpec::matrix(2)),
      make_algebra(AlgebraSpec::matrix(3, 0.7)),
      make_algebra(AlgebraSpec::diagonal({0.5, 1.5, 1.0, 2.0})),
      make_algebra({{2, 0.5}, {1, 1.5}}),
      make_algebra({{3, 1.0}, {2, 0.25}, {1, 3.0}}),
  };
}

inline double max_abs(const Operator& x) {
  double m = 0.0;
  for (const auto& b : x.blocks())
    if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

inline double distance(const Operator& a, const Operator& b) { return max_abs(a - b); }

inline Operator from_rows(const AlgebraPtr& alg, std::vector<std::vector<cplx>> rows) {
  const int d = static_cast<int>(rows.size());
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rows[i][j];
  return Operator(alg, {m});
}

}  // namespace testing
