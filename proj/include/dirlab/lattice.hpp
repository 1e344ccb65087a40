#pragma once

#include <cmath>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "dirlab/numeric.hpp"

namespace dirlab {

/// Determinant tolerance used when accepting a basis.
inline constexpr double kDetConstructionTol = 1e-6;
/// Determinant tolerance used by invariant checks.
inline constexpr double kDetAssertionTol = 1e-9;

/// A unimodular lattice in R^n, n in {3, 4}, given by a basis whose columns
/// generate it. The represented basis is exp(log_scale) * basis().
template <typename Scalar>
class BasicLattice {
 public:
  using MatrixType = Matrix<Scalar>;

  BasicLattice() = default;

  int dim() const { return static_cast<int>(basis_.cols()); }
  const MatrixType& basis() const { return basis_; }
  double log_scale() const { return log_scale_; }

  /// Basis with the exponent offset folded back in.
  MatrixType scaled_basis() const {
    if (log_scale_ == 0.0) return basis_;
    return basis_ * Scalar(std::exp(log_scale_));
  }

  template <typename Other>
  BasicLattice<Other> cast() const {
    return BasicLattice<Other>::FromTrustedBasis(CastMatrix<Other>(basis_),
                                                 log_scale_);
  }

  /// Skips validation; for bases known to be unimodular (products with SL_n
  /// elements, integral changes of basis).
  static BasicLattice FromTrustedBasis(MatrixType basis,
                                       double log_scale = 0.0) {
    BasicLattice l;
    l.basis_ = std::move(basis);
    l.log_scale_ = log_scale;
    return l;
  }

 private:
  MatrixType basis_;
  double log_scale_ = 0.0;
};

using Lattice = BasicLattice<double>;
using Lattice50 = BasicLattice<Real50>;

enum class Normalize {
  /// Rescale only when |det| is already within kDetConstructionTol of 1.
  kIfClose,
  /// Rescale any nonsingular basis to covolume 1.
  kAlways,
};

/// Validates a square basis of dimension 3 or 4 and rescales its columns
/// uniformly so that |det| = 1.
template <typename Scalar>
BasicLattice<Scalar> MakeLattice(Matrix<Scalar> basis,
                                 Normalize normalize = Normalize::kIfClose) {
  using std::abs;
  using std::pow;
  if (basis.rows() != basis.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "basis must be square");
  }
  const int n = static_cast<int>(basis.rows());
  if (n != 3 && n != 4) {
    throw Error(ErrorCode::kInvalidArgument, "dimension must be 3 or 4");
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!std::isfinite(ToDouble(basis(i, j))))
        throw Error(ErrorCode::kInvalidArgument, "non-finite basis entry");
  const Scalar det = basis.determinant();
  const Scalar abs_det = abs(det);
  if (abs_det < Scalar(1e-12)) {
    throw Error(ErrorCode::kSingularBasis,
                "|det| = " + std::to_string(ToDouble(abs_det)));
  }
  if (normalize == Normalize::kIfClose &&
      abs(abs_det - Scalar(1)) > Scalar(kDetConstructionTol)) {
    throw Error(ErrorCode::kDeterminantMismatch,
                "|det| = " + std::to_string(ToDouble(abs_det)));
  }
  basis *= Scalar(pow(abs_det, Scalar(-1) / Scalar(n)));
  return BasicLattice<Scalar>::FromTrustedBasis(std::move(basis));
}

inline Lattice MakeLattice(const Eigen::MatrixXd& basis,
                           Normalize normalize = Normalize::kIfClose) {
  return MakeLattice<double>(Matrix<double>(basis), normalize);
}

/// Standard lattice Z^n.
inline Lattice StandardLattice(int n) {
  return Lattice::FromTrustedBasis(Eigen::MatrixXd::Identity(n, n));
}

/// {"dim": n, "basis": [[row-major]]}, 17 significant digits.
nlohmann::json LatticeToJson(const Lattice& lattice);
Lattice LatticeFromJson(const nlohmann::json& j);

}  // namespace dirlab
