#ifndef SPLITDYN_MASS_MODEL_HPP
#define SPLITDYN_MASS_MODEL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "types.hpp"

namespace splitdyn {

/// Symmetric positive definite mass coefficients m_AB coupling the particles.
/// Momenta relate to velocities through the full matrix: p^A = sum_B m_AB v_B,
/// so a consistent mass matrix (off-diagonal coupling) is supported alongside
/// the usual diagonal (lumped) case.
class MassModel {
 public:
  explicit MassModel(Eigen::MatrixXd coefficients) : m_(std::move(coefficients)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols())
      throw ill_posed_mass("mass matrix must be square and non-empty");
    const double scale = m_.cwiseAbs().maxCoeff();
    if (!std::isfinite(scale)) throw ill_posed_mass("mass matrix has non-finite entries");
    if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw ill_posed_mass("mass matrix must be symmetric");
    m_ = 0.5 * (m_ + m_.transpose().eval());  // exact symmetry for the factorization
    llt_.compute(m_);
    if (llt_.info() != Eigen::Success)
      throw ill_posed_mass("mass matrix must be positive definite");
    row_weight_ = m_.rowwise().sum();
    total_ = row_weight_.sum();
    inverse_ = llt_.solve(Eigen::MatrixXd::Identity(m_.rows(), m_.cols()));
  }

  [[nodiscard]] static MassModel diagonal(const std::vector<double>& masses) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(masses.size()));
    for (std::size_t a = 0; a < masses.size(); ++a) d[static_cast<Eigen::Index>(a)] = masses[a];
    return MassModel(Eigen::MatrixXd(d.asDiagonal()));
  }

  [[nodiscard]] static MassModel uniform(std::size_t n, double mass) {
    return diagonal(std::vector<double>(n, mass));
  }

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  [[nodiscard]] const Eigen::MatrixXd& coefficients() const { return m_; }
  [[nodiscard]] double coefficient(std::size_t a, std::size_t b) const {
    return m_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }

  /// sum_B m_AB, the weight row A contributes to the mass-weighted centroid.
  [[nodiscard]] double row_weight(std::size_t a) const {
    return row_weight_[static_cast<Eigen::Index>(a)];
  }
  [[nodiscard]] double total() const { return total_; }

  /// Applies M^-1 coordinate-by-coordinate: out_A = sum_B (M^-1)_AB in_B.
  [[nodiscard]] std::vector<Vec3> solve(const std::vector<Vec3>& in) const {
    return mapped(in, true);
  }

  /// Applies M coordinate-by-coordinate: out_A = sum_B m_AB in_B.
  [[nodiscard]] std::vector<Vec3> multiply(const std::vector<Vec3>& in) const {
    return mapped(in, false);
  }

  /// v_A = sum_B (M^-1)_AB p^B.
  [[nodiscard]] std::vector<Vec3> velocities(const std::vector<Vec3>& momenta) const {
    return solve(momenta);
  }

  /// Dense M^-1, used to assemble the coordinate-expanded solver matrices.
  [[nodiscard]] const Eigen::MatrixXd& inverse() const { return inverse_; }

  /// Allocation-free variant of solve() for hot loops: rhs and out are N x 3
  /// with one particle per row, pre-sized by the caller.
  void solve_into(const Eigen::MatrixX3d& rhs, Eigen::MatrixX3d& out) const {
    out = llt_.solve(rhs);
  }

  /// (1/2) sum_AB (M^-1)_AB p^A . p^B.
  [[nodiscard]] double kinetic_energy(const std::vector<Vec3>& momenta) const {
    const std::vector<Vec3> v = solve(momenta);
    double k = 0.0;
    for (std::size_t a = 0; a < momenta.size(); ++a) k += momenta[a].dot(v[a]);
    return 0.5 * k;
  }

 private:
  [[nodiscard]] std::vector<Vec3> mapped(const std::vector<Vec3>& in, bool inverse) const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd rhs(n, 3);
    for (Eigen::Index a = 0; a < n; ++a) rhs.row(a) = in[static_cast<std::size_t>(a)].transpose();
    const Eigen::MatrixXd sol = inverse ? llt_.solve(rhs).eval() : (m_ * rhs).eval();
    std::vector<Vec3> out(static_cast<std::size_t>(n));
    for (Eigen::Index a = 0; a < n; ++a) out[static_cast<std::size_t>(a)] = sol.row(a).transpose();
    return out;
  }

  Eigen::MatrixXd m_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd inverse_;
  Eigen::VectorXd row_weight_;
  double total_ = 0.0;
};

}  // namespace splitdyn

#endif
