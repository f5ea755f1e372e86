#pragma once

// Small (one- and two-qubit) density matrices and the functionals evaluated
// on them: overlap fidelity, von Neumann entropy, Werner-form fit.
//
// Two-qubit matrices use the index 2*b_first + b_second, where b is the bit
// value (0 = up) of the first and second listed site.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <span>
#include <string>

#include "spinlink/types.hpp"

namespace spinlink {

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

enum class Pauli { X, Y, Z, Plus, Minus };

/// sigma^+ = |0><1| raises Sz; sigma^- = |1><0| lowers it.
inline Matrix2c pauli_matrix(Pauli axis) {
  Matrix2c m = Matrix2c::Zero();
  switch (axis) {
    case Pauli::X: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case Pauli::Y: m(0, 1) = -kI; m(1, 0) = kI; break;
    case Pauli::Z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    case Pauli::Plus: m(0, 1) = 1.0; break;
    case Pauli::Minus: m(1, 0) = 1.0; break;
  }
  return m;
}

/// Single-qubit encoding rotation
///   [ cos(theta/2)            -sin(theta/2) e^{-i phi} ]
///   [ sin(theta/2) e^{i phi}   cos(theta/2)            ]
inline Matrix2c rotation_matrix(double theta, double phi) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Matrix2c m;
  m << c, -s * std::exp(-kI * phi), s * std::exp(kI * phi), c;
  return m;
}

struct DensityTolerance {
  double hermitian = 1e-12;
  double trace = 1e-10;
  double eigenvalue = 1e-10;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(MatrixXc entries, DensityTolerance tol = {}) : m_(std::move(entries)) {
    require(m_.rows() == m_.cols() && (m_.rows() == 2 || m_.rows() == 4),
            "density matrix must be 2x2 or 4x4");
    const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    require(herm <= tol.hermitian * std::max(1.0, m_.cwiseAbs().maxCoeff()),
            "density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
    m_ = 0.5 * (m_ + m_.adjoint()).eval();
    const double tr = m_.trace().real();
    require(std::abs(tr - 1.0) <= tol.trace,
            "density matrix trace deviates from 1: " + std::to_string(tr));
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(m_, Eigen::EigenvaluesOnly);
    min_eig_ = es.eigenvalues().minCoeff();
    require(min_eig_ >= -tol.eigenvalue,
            "density matrix is not positive semidefinite (eigenvalue " + std::to_string(min_eig_) + ")");
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const MatrixXc& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double min_eigenvalue() const { return min_eig_; }

 private:
  MatrixXc m_;
  double min_eig_ = 0.0;
};

inline DensityMatrix pure_density(const VectorXc& psi) {
  return DensityMatrix(psi * psi.adjoint() / psi.squaredNorm());
}

inline DensityMatrix maximally_mixed(int dim) {
  return DensityMatrix(MatrixXc::Identity(dim, dim) / static_cast<double>(dim));
}

/// <psi|rho|psi> for a normalized pure state psi.
inline double state_fidelity(const DensityMatrix& rho, const VectorXc& psi) {
  require(psi.size() == rho.dim(), "fidelity: state dimension " + std::to_string(psi.size()) +
                                       " does not match density matrix dimension " +
                                       std::to_string(rho.dim()));
  const Complex f = psi.dot(rho.matrix() * psi);
  require(std::abs(f.imag()) <= 1e-12, "fidelity has non-negligible imaginary part");
  return f.real();
}

inline constexpr double kEntropyClamp = 1e-12;

/// -sum lambda log2 lambda over eigenvalues above the clamp threshold.
inline double entropy_bits(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (double lam : eigenvalues) {
    if (lam > kEntropyClamp) s -= lam * std::log2(lam);
  }
  return s;
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho.matrix(), Eigen::EigenvaluesOnly);
  return entropy_bits(es.eigenvalues());
}

// Bell states

enum class BellLabel { I, X, Y, Z };

inline constexpr std::array<BellLabel, 4> kBellLabels{BellLabel::I, BellLabel::X, BellLabel::Y,
                                                      BellLabel::Z};

inline std::string to_string(BellLabel a) {
  switch (a) {
    case BellLabel::I: return "I";
    case BellLabel::X: return "x";
    case BellLabel::Y: return "y";
    case BellLabel::Z: return "z";
  }
  return "?";
}

inline Matrix2c bell_encoding(BellLabel a) {
  switch (a) {
    case BellLabel::X: return pauli_matrix(Pauli::X);
    case BellLabel::Y: return pauli_matrix(Pauli::Y);
    case BellLabel::Z: return pauli_matrix(Pauli::Z);
    case BellLabel::I: break;
  }
  return Matrix2c::Identity();
}

/// (|01> - |10>)/sqrt(2)
inline VectorXc singlet() {
  VectorXc v = VectorXc::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v;
}

/// a (x) b with a acting on the first (most significant) qubit.
inline Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

/// |b^a> = (sigma^a (x) I)|psi->
inline VectorXc bell_state(BellLabel a) {
  return kron(bell_encoding(a), Matrix2c::Identity()) * singlet();
}

inline DensityMatrix werner_state(double p) {
  const VectorXc s = singlet();
  MatrixXc m = p * (s * s.adjoint()) + (1.0 - p) * MatrixXc::Identity(4, 4) / 4.0;
  return DensityMatrix(m);
}

struct WernerFit {
  double p;
  /// Frobenius distance between rho and the Werner state with weight p.
  double distance;
};

inline WernerFit werner_p(const DensityMatrix& rho) {
  require(rho.dim() == 4, "werner_p needs a two-qubit density matrix");
  const VectorXc s = singlet();
  const double singlet_weight = s.dot(rho.matrix() * s).real();
  const double p = (4.0 * singlet_weight - 1.0) / 3.0;
  MatrixXc w = p * (s * s.adjoint()) + (1.0 - p) * MatrixXc::Identity(4, 4) / 4.0;
  return {p, (rho.matrix() - w).norm()};
}

/// Weighted mixture sum_i q_i rho_i.
inline DensityMatrix mixture(std::span<const DensityMatrix> states, std::span<const double> weights) {
  require(!states.empty() && states.size() == weights.size(), "mixture: size mismatch");
  MatrixXc acc = MatrixXc::Zero(states[0].dim(), states[0].dim());
  for (std::size_t i = 0; i < states.size(); ++i) {
    require(states[i].dim() == states[0].dim(), "mixture: dimension mismatch");
    acc += weights[i] * states[i].matrix();
  }
  return DensityMatrix(acc);
}

/// Holevo quantity S(sum q rho) - sum q S(rho), in bits.
inline double holevo_information(std::span<const DensityMatrix> states, std::span<const double> priors) {
  require(states.size() == priors.size(), "holevo: priors and states differ in length");
  double total = 0.0;
  double mean_entropy = 0.0;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    require(priors[i] >= 0.0, "holevo: negative prior");
    total += priors[i];
    if (priors[i] > 0.0) mean_entropy += priors[i] * von_neumann_entropy(states[i]);
  }
  require(std::abs(total - 1.0) <= 1e-12, "holevo: priors must sum to 1");
  return von_neumann_entropy(mixture(states, priors)) - mean_entropy;
}

}  // namespace spinlink
