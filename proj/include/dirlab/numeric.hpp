#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace dirlab {

// 50 decimal digits; expression templates off so the type composes with Eigen.
using Real50 = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<50>, boost::multiprecision::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

enum class ErrorCode {
  kInvalidArgument,
  kSingularBasis,
  kDeterminantMismatch,
  kEnumerationOverflow,
  kWitnessNotFound,
  kNoSolution,
  kNondegeneracy,
  kFrameSingular,
  kFactorizationSingular,
  kDegenerateSegment,
  kRankTestUnstable,
  kSearchExhausted,
};

const char* ErrorName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Fraction-free (Bareiss) determinant; exact while minors fit in 127 bits.
__int128 IntegerDeterminant(const IntMatrix& m);

/// Entries above this magnitude switch lattice arithmetic to Real50.
inline constexpr double kDoubleSafeMagnitude = 1e12;

template <typename Scalar>
inline double ToDouble(const Scalar& x) {
  return static_cast<double>(x);
}

template <typename Scalar>
Matrix<double> ToDouble(const Matrix<Scalar>& m) {
  return m.unaryExpr([](const Scalar& x) { return static_cast<double>(x); });
}

template <typename To, typename From>
Matrix<To> CastMatrix(const Matrix<From>& m) {
  return m.unaryExpr([](const From& x) { return static_cast<To>(x); });
}

/// Pairwise summation in a fixed tree order; the result does not depend on how
/// the inputs were produced, only on their order.
double PairwiseSum(const double* data, std::size_t n);

inline double PairwiseSum(const std::vector<double>& values) {
  return PairwiseSum(values.data(), values.size());
}

/// Nearest integer; exact half-integers go toward zero.
template <typename Scalar>
Scalar RoundHalfTowardZero(const Scalar& x) {
  using std::ceil;
  using std::floor;
  Scalar lo = floor(x);
  Scalar diff = x - lo;
  if (diff > Scalar(0.5)) return lo + 1;
  if (diff < Scalar(0.5)) return lo;
  return x > 0 ? lo : lo + 1;
}

}  // namespace dirlab
