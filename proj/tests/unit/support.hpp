#pragma once

#include <cmath>
#include <cstdint>

#include "addsel/basis.hpp"
#include "addsel/random.hpp"

namespace addsel::testing {

inline Matrix random_unit_matrix(Eigen::Index n, Eigen::Index p, Philox& rng) {
  Matrix X(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.uniform();
  return X;
}

inline Vector random_normal_vector(Eigen::Index n, Philox& rng) {
  Vector v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

/// Independent least-squares oracle: LDLT on the normal equations.
inline Vector normal_equations(const Matrix& Z, const Vector& y) {
  const Matrix gram = Z.transpose() * Z;
  return gram.ldlt().solve(Z.transpose() * y);
}

/// Sparse additive response: linear in X_0, sine in X_1, plus noise.
inline Vector two_component_response(const Matrix& X, double sd, Philox& rng) {
  Vector y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    y[i] = 5.0 * X(i, 0) - 2.5 + 2.0 * std::sin(2.0 * M_PI * X(i, 1)) + sd * rng.normal();
  }
  return y;
}

}  // namespace addsel::testing
