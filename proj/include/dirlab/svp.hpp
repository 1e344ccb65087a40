#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dirlab/reduction.hpp"

namespace dirlab {

/// A nonzero lattice vector: point = basis * coeffs, norm = sup-norm of point.
struct ShortVector {
  IntVector coeffs;
  Eigen::VectorXd point;
  double norm = 0.0;
};

/// Refuse enumerations whose coefficient box exceeds this many vectors.
inline constexpr double kMaxEnumerationCandidates = 1e9;

/// Relative tolerance under which two sup-norms count as tied.
inline constexpr double kTieTolerance = 1e-12;

/// Flips the sign of `c` so its first nonzero entry is positive.
IntVector CanonicalSign(const IntVector& c);

/// Order used to pick among equally short vectors: smaller l1 norm of the
/// canonical coefficient vector first, then lexicographically larger.
bool PreferCoefficients(const IntVector& a, const IntVector& b);

namespace detail {

template <typename Scalar>
Scalar SupNorm(const Vector<Scalar>& v) {
  return v.cwiseAbs().maxCoeff();
}

// Fincke-Pohst depth-first enumeration of the points of the lattice spanned by
// the columns of `b` with sup-norm at most `*radius`, one per +-pair. A point
// is inside the sup-norm ball of radius R only if it lies in the Euclidean
// ball of radius sqrt(n) R, and each coefficient obeys the Cramer bound
// |c_i| <= |row_i(b^-1)|_1 R. `visit(coeffs, point)` may shrink *radius.
template <typename Scalar, typename Visit>
void EnumerateBall(const Matrix<Scalar>& b, Scalar* radius, Visit&& visit) {
  using std::abs;
  using std::ceil;
  using std::floor;
  using std::sqrt;
  const int n = static_cast<int>(b.cols());
  const Eigen::HouseholderQR<Matrix<Scalar>> qr(b);
  const Matrix<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  const Matrix<Scalar> inv = b.inverse();
  Vector<Scalar> cramer(n);
  for (int i = 0; i < n; ++i) cramer(i) = inv.row(i).cwiseAbs().sum();

  double box = 1.0;
  for (int i = 0; i < n; ++i) {
    box *= 2.0 * std::floor(ToDouble(cramer(i) * *radius)) + 1.0;
  }
  if (box > kMaxEnumerationCandidates) {
    throw Error(ErrorCode::kEnumerationOverflow,
                "coefficient box holds ~" + std::to_string(box) + " vectors");
  }

  const Scalar slack = Scalar(1) + Scalar(1e-9);
  IntVector c = IntVector::Zero(n);
  Vector<Scalar> point(b.rows());
  // partial(i) = squared length contributed by levels i+1..n-1.
  Vector<Scalar> partial = Vector<Scalar>::Zero(n + 1);
  std::vector<std::int64_t> hi(n);
  // Levels are processed from n-1 down to 0. To visit each +-pair once, the
  // highest nonzero coefficient is required to be positive.
  auto bounds = [&](int i, std::int64_t* lo_out, std::int64_t* hi_out,
                    bool* feasible) {
    Scalar center = 0;
    for (int j = i + 1; j < n; ++j) center -= r(i, j) * Scalar(c(j));
    center /= r(i, i);
    const Scalar budget =
        Scalar(n) * *radius * *radius * slack - partial(i + 1);
    if (budget < 0) {
      *feasible = false;
      return;
    }
    const Scalar half = sqrt(budget) / abs(r(i, i));
    Scalar lo = ceil(center - half);
    Scalar up = floor(center + half);
    const Scalar cb = floor(cramer(i) * *radius * slack);
    lo = std::max(lo, Scalar(-cb));
    up = std::min(up, cb);
    bool all_zero_above = true;
    for (int j = i + 1; j < n; ++j) all_zero_above &= c(j) == 0;
    if (all_zero_above) lo = std::max(lo, Scalar(i == 0 ? 1 : 0));
    *feasible = lo <= up;
    *lo_out = static_cast<std::int64_t>(lo);
    *hi_out = static_cast<std::int64_t>(up);
  };

  int level = n - 1;
  bool feasible = false;
  std::int64_t lo0 = 0, hi0 = 0;
  bounds(level, &lo0, &hi0, &feasible);
  if (!feasible) return;
  c(level) = lo0;
  hi[level] = hi0;
  while (true) {
    if (c(level) > hi[level]) {
      c(level) = 0;
      if (++level >= n) return;
      ++c(level);
      continue;
    }
    Scalar s = 0;
    for (int j = level; j < n; ++j) s += r(level, j) * Scalar(c(j));
    partial(level) = partial(level + 1) + s * s;
    if (level == 0) {
      if (partial(0) <= Scalar(n) * *radius * *radius * slack) {
        point = b * c.cast<Scalar>();
        visit(static_cast<const IntVector&>(c), point);
      }
      ++c(0);
      continue;
    }
    --level;
    std::int64_t lo = 0, up = 0;
    bounds(level, &lo, &up, &feasible);
    if (!feasible) {
      c(level) = 0;
      ++level;
      ++c(level);
      continue;
    }
    c(level) = lo;
    hi[level] = up;
  }
}

template <typename Scalar>
ShortVector ToShortVector(const IntVector& coeffs, const Vector<Scalar>& point,
                          const Scalar& norm) {
  ShortVector v;
  v.coeffs = coeffs;
  v.point = point.unaryExpr([](const Scalar& x) { return ToDouble(x); });
  v.norm = ToDouble(norm);
  return v;
}

}  // namespace detail

/// Globally shortest nonzero vector in sup-norm. Among vectors whose norms tie
/// to kTieTolerance, the canonical coefficient vector preferred by
/// PreferCoefficients wins. Coefficients refer to the lattice's own basis.
template <typename Scalar>
ShortVector ShortestVector(const BasicLattice<Scalar>& lattice) {
  const Matrix<Scalar> basis = lattice.scaled_basis();
  const ReducedBasis<Scalar> red = LllReduce(basis);
  const int n = lattice.dim();

  Scalar best = detail::SupNorm<Scalar>(red.basis.col(0));
  for (int i = 1; i < n; ++i) {
    best = std::min(best, detail::SupNorm<Scalar>(red.basis.col(i)));
  }
  Scalar radius = best * (Scalar(1) + Scalar(kTieTolerance));
  IntVector best_coeffs;
  Vector<Scalar> best_point;
  bool have = false;
  const Scalar tie = Scalar(kTieTolerance);
  detail::EnumerateBall<Scalar>(
      red.basis, &radius, [&](const IntVector& c, const Vector<Scalar>& p) {
        const Scalar norm = detail::SupNorm<Scalar>(p);
        if (!have || norm < best * (Scalar(1) - tie)) {
          const IntVector orig = CanonicalSign(red.transform * c);
          const Scalar sign = (red.transform * c) == orig ? 1 : -1;
          have = true;
          best = norm;
          best_coeffs = orig;
          best_point = sign * p;
          radius = std::min(radius, best * (Scalar(1) + tie));
        } else if (norm <= best * (Scalar(1) + tie)) {
          const IntVector raw = red.transform * c;
          const IntVector orig = CanonicalSign(raw);
          if (PreferCoefficients(orig, best_coeffs)) {
            best_coeffs = orig;
            best_point = raw == orig ? Vector<Scalar>(p) : Vector<Scalar>(-p);
            best = std::min(best, norm);
          }
        }
      });
  if (!have) {
    throw Error(ErrorCode::kSingularBasis, "enumeration found no vector");
  }
  return detail::ToShortVector<Scalar>(best_coeffs, best_point,
                                       detail::SupNorm<Scalar>(best_point));
}

/// Double-precision entry point; switches to Real50 when basis entries exceed
/// kDoubleSafeMagnitude.
ShortVector ShortestVector(const Lattice& lattice);

/// Sup-norm length of a shortest nonzero vector.
double Systole(const Lattice& lattice);

/// All nonzero lattice points with sup-norm strictly below `radius`, one per
/// +-pair (coefficients in canonical sign), sorted by norm then coefficients.
template <typename Scalar>
std::vector<ShortVector> CubePoints(const BasicLattice<Scalar>& lattice,
                                    double radius) {
  if (!(radius > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  }
  const ReducedBasis<Scalar> red = LllReduce(lattice.scaled_basis());
  std::vector<ShortVector> out;
  Scalar r = Scalar(radius);
  const Scalar strict = Scalar(radius);
  detail::EnumerateBall<Scalar>(
      red.basis, &r, [&](const IntVector& c, const Vector<Scalar>& p) {
        const Scalar norm = detail::SupNorm<Scalar>(p);
        if (!(norm < strict)) return;
        const IntVector raw = red.transform * c;
        const IntVector orig = CanonicalSign(raw);
        out.push_back(detail::ToShortVector<Scalar>(
            orig, raw == orig ? Vector<Scalar>(p) : Vector<Scalar>(-p), norm));
      });
  std::sort(out.begin(), out.end(),
            [](const ShortVector& a, const ShortVector& b) {
              if (a.norm != b.norm) return a.norm < b.norm;
              return PreferCoefficients(a.coeffs, b.coeffs);
            });
  return out;
}

std::vector<ShortVector> CubePoints(const Lattice& lattice, double radius);

/// Membership in K_eps: systole at least eps (within 1e-9).
bool InKEps(const Lattice& lattice, double eps);

}  // namespace dirlab
