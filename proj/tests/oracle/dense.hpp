#pragma once

// Dense reference implementations used only by the tests. Everything here is
// built from explicit Kronecker products of 2x2 matrices and full
// diagonalization, sharing no code path with the matrix-free library.

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat pauli(char axis) {
  Mat m = Mat::Zero(2, 2);
  const Complex i{0.0, 1.0};
  switch (axis) {
    case 'x': m(0, 1) = 1; m(1, 0) = 1; break;
    case 'y': m(0, 1) = -i; m(1, 0) = i; break;
    case 'z': m(0, 0) = 1; m(1, 1) = -1; break;
    case '+': m(0, 1) = 1; break;  // |0><1|
    case '-': m(1, 0) = 1; break;  // |1><0|
    default: m = Mat::Identity(2, 2);
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Operator `op` on 1-based `site` of an n-site chain. Site k is bit k-1, so
/// site N is the leftmost Kronecker factor.
inline Mat site_op(int n, int site, const Mat& op) {
  Mat out = Mat::Identity(1, 1);
  for (int k = n; k >= 1; --k) out = kron(out, k == site ? op : Mat::Identity(2, 2));
  return out;
}

inline Mat heisenberg(int n, const std::vector<double>& bonds) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Mat h = Mat::Zero(d, d);
  for (int k = 1; k < n; ++k)
    for (char a : {'x', 'y', 'z'})
      h += bonds[static_cast<std::size_t>(k - 1)] * site_op(n, k, pauli(a)) * site_op(n, k + 1, pauli(a));
  return h;
}

inline std::vector<double> dimer_bonds(int n, double delta) {
  std::vector<double> b;
  for (int k = 1; k < n; ++k) b.push_back(k % 2 == 1 ? 1.0 + delta : 1.0 - delta);
  return b;
}

struct Spectrum {
  Eigen::VectorXd energies;
  Mat vectors;
};

inline Spectrum diagonalize(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

inline Vec expm_apply(const Spectrum& sp, const Vec& v, double t) {
  const Complex i{0.0, 1.0};
  Vec c = sp.vectors.adjoint() * v;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-i * t * sp.energies(k));
  return sp.vectors * c;
}

/// Reduced density matrix over sites (a, b), index 2*bit_a + bit_b.
inline Mat reduced_pair(int n, const Vec& psi, int a, int b) {
  Mat rho = Mat::Zero(4, 4);
  const Eigen::Index d = psi.size();
  const std::size_t ma = std::size_t{1} << (a - 1);
  const std::size_t mb = std::size_t{1} << (b - 1);
  for (Eigen::Index s = 0; s < d; ++s)
    for (Eigen::Index t = 0; t < d; ++t) {
      const auto us = static_cast<std::size_t>(s), ut = static_cast<std::size_t>(t);
      if ((us & ~(ma | mb)) != (ut & ~(ma | mb))) continue;
      const int r = ((us & ma) ? 2 : 0) + ((us & mb) ? 1 : 0);
      const int c = ((ut & ma) ? 2 : 0) + ((ut & mb) ? 1 : 0);
      rho(r, c) += psi(s) * std::conj(psi(t));
    }
  (void)n;
  return rho;
}

/// Dense ground state of a dimerized chain, sign-fixed like the library.
inline Vec ground_vector(const Spectrum& sp) {
  Vec g = sp.vectors.col(0);
  Eigen::Index big = 0;
  g.cwiseAbs().maxCoeff(&big);
  return g * (std::abs(g(big)) / g(big));
}

}  // namespace oracle
