#pragma once

#include <cmath>
#include <utility>

#include "dirlab/lattice.hpp"

namespace dirlab {

/// `basis == input * transform` with `transform` unimodular.
template <typename Scalar>
struct ReducedBasis {
  Matrix<Scalar> basis;
  IntMatrix transform;
};

namespace detail {

// Gram-Schmidt of the columns: mu(i, j) for j < i, squared norms in `norms`.
template <typename Scalar>
void GramSchmidt(const Matrix<Scalar>& b, Matrix<Scalar>& mu,
                 Vector<Scalar>& norms) {
  const int n = static_cast<int>(b.cols());
  Matrix<Scalar> star = b;
  mu.setZero(n, n);
  norms.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      mu(i, j) = b.col(i).dot(star.col(j)) / norms(j);
      star.col(i) -= mu(i, j) * star.col(j);
    }
    norms(i) = star.col(i).squaredNorm();
  }
}

}  // namespace detail

/// LLL reduction of the columns (Lovasz parameter `delta`). The output is
/// size-reduced: every Gram-Schmidt coefficient has magnitude at most 1/2.
template <typename Scalar>
ReducedBasis<Scalar> LllReduce(const Matrix<Scalar>& input,
                               double delta = 0.99) {
  using std::abs;
  using std::round;
  const int n = static_cast<int>(input.cols());
  ReducedBasis<Scalar> out{input, IntMatrix::Identity(n, n)};
  Matrix<Scalar>& b = out.basis;
  IntMatrix& u = out.transform;

  Scalar scale = b.cwiseAbs().maxCoeff();
  scale *= scale;
  const Scalar tiny = scale * Scalar(1e-60);

  Matrix<Scalar> mu;
  Vector<Scalar> norms;
  detail::GramSchmidt(b, mu, norms);
  for (int i = 0; i < n; ++i) {
    if (!(norms(i) > tiny)) {
      throw Error(ErrorCode::kSingularBasis, "rank loss during reduction");
    }
  }

  int k = 1;
  long iterations = 0;
  while (k < n) {
    if (++iterations > 1'000'000) {
      throw Error(ErrorCode::kSingularBasis, "LLL failed to terminate");
    }
    for (int j = k - 1; j >= 0; --j) {
      const Scalar q = round(mu(k, j));
      if (q == 0) continue;
      const auto qi = static_cast<std::int64_t>(q);
      b.col(k) -= q * b.col(j);
      u.col(k) -= qi * u.col(j);
      for (int l = 0; l <= j; ++l) {
        mu(k, l) -= q * (l == j ? Scalar(1) : mu(j, l));
      }
    }
    if (norms(k) >= (Scalar(delta) - mu(k, k - 1) * mu(k, k - 1)) *
                        norms(k - 1)) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      u.col(k).swap(u.col(k - 1));
      detail::GramSchmidt(b, mu, norms);
      if (!(norms(k - 1) > tiny) || !(norms(k) > tiny)) {
        throw Error(ErrorCode::kSingularBasis, "rank loss during reduction");
      }
      k = std::max(k - 1, 1);
    }
  }
  return out;
}

/// Same lattice, LLL-reduced basis (size-reduced; columns in LLL order,
/// which is nondecreasing in Gram-Schmidt length up to the Lovasz slack).
template <typename Scalar>
BasicLattice<Scalar> ReduceBasis(const BasicLattice<Scalar>& lattice) {
  return BasicLattice<Scalar>::FromTrustedBasis(
      LllReduce(lattice.basis()).basis, lattice.log_scale());
}

/// prod |b_i| / |det b|; 1 for orthogonal bases.
double OrthogonalityDefect(const Eigen::MatrixXd& basis);

/// Bases with a larger defect are reduced and enumerated in Real50.
inline constexpr double kMaxDoubleDefect = 1e6;

/// As above; skewed or huge double bases are reduced in Real50 and rounded
/// back.
Lattice ReduceBasis(const Lattice& lattice);

/// Equality of lattices: `a^-1 b` integral with determinant +-1.
bool SameLattice(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 double tol = 1e-6);

}  // namespace dirlab
