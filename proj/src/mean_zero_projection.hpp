#pragma once

// Internal helpers for working on the mean-zero subspace of periodic strain
// sequences. The subspace is parametrized through the Householder reflection
// H that swaps the normalized all-ones vector with the last coordinate axis;
// the first N-1 columns of H are then an orthonormal basis of the subspace.

#include "bqclab/energy.hpp"

#include <Eigen/Dense>

namespace bqclab::detail {

/// Matrix of the Hessian quadratic form in strain coordinates w = u':
/// d2Phi(y)[u,u] = eps * w^T K w with
/// K = diag(a_bar) + D^T diag(b_bar) D, (D w)_xi = w_{xi+1} - w_xi (periodic).
inline Eigen::MatrixXd strain_form_matrix(const HessianCoefficients& h) {
  const int n = static_cast<int>(h.a_bar.size());
  Eigen::MatrixXd k = h.a_bar.matrix().asDiagonal();
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const double b = h.b_bar[i];
    k(i, i) += b;
    k(j, j) += b;
    k(i, j) -= b;
    k(j, i) -= b;
  }
  return k;
}

struct MeanZeroBasis {
  Eigen::VectorXd q;  // Householder vector, H = I - 2 q q^T
  int n = 0;

  explicit MeanZeroBasis(int n_atoms) : n(n_atoms) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    q = v;
    q(n - 1) -= 1.0;
    q.normalize();
  }

  /// Upper-left (N-1) block of H K H: the form restricted to the subspace.
  Eigen::MatrixXd project(const Eigen::MatrixXd& k) const {
    const Eigen::VectorXd kq = k * q;
    const double qkq = q.dot(kq);
    Eigen::MatrixXd hkh = k;
    hkh.noalias() -= 2.0 * q * kq.transpose();
    hkh.noalias() -= 2.0 * kq * q.transpose();
    hkh.noalias() += (4.0 * qkq) * q * q.transpose();
    return hkh.topLeftCorner(n - 1, n - 1);
  }

  /// Coordinates -> mean-zero vector: w = H [z; 0].
  Eigen::VectorXd lift(const Eigen::VectorXd& z) const {
    Eigen::VectorXd padded(n);
    padded.head(n - 1) = z;
    padded(n - 1) = 0.0;
    return padded - 2.0 * q * q.dot(padded);
  }

  /// Mean-zero vector -> coordinates: z = (H w) without its last entry.
  Eigen::VectorXd reduce(const Eigen::VectorXd& w) const {
    const Eigen::VectorXd hw = w - 2.0 * q * q.dot(w);
    return hw.head(n - 1);
  }
};

}  // namespace bqclab::detail
