#include "dirlab/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirlab/reduction.hpp"
#include "dirlab/svp.hpp"

namespace dirlab {

const char* ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kSingularBasis: return "SingularBasis";
    case ErrorCode::kDeterminantMismatch: return "DeterminantMismatch";
    case ErrorCode::kEnumerationOverflow: return "EnumerationOverflow";
    case ErrorCode::kWitnessNotFound: return "WitnessNotFound";
    case ErrorCode::kNoSolution: return "NoSolution";
    case ErrorCode::kNondegeneracy: return "Nondegeneracy";
    case ErrorCode::kFrameSingular: return "FrameSingular";
    case ErrorCode::kFactorizationSingular: return "FactorizationSingular";
    case ErrorCode::kDegenerateSegment: return "DegenerateSegment";
    case ErrorCode::kRankTestUnstable: return "RankTestUnstable";
    case ErrorCode::kSearchExhausted: return "SearchExhausted";
  }
  return "Error";
}

double PairwiseSum(const double* data, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return PairwiseSum(data, half) + PairwiseSum(data + half, n - half);
}

namespace {

double Round17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace

nlohmann::json LatticeToJson(const Lattice& lattice) {
  const Eigen::MatrixXd b = lattice.scaled_basis();
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < b.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < b.cols(); ++j) row.push_back(Round17(b(i, j)));
    rows.push_back(row);
  }
  return {{"dim", lattice.dim()}, {"basis", rows}};
}

Lattice LatticeFromJson(const nlohmann::json& j) {
  const int n = j.at("dim").get<int>();
  const auto& rows = j.at("basis");
  if (static_cast<int>(rows.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "basis row count != dim");
  }
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) {
      throw Error(ErrorCode::kInvalidArgument, "basis row length != dim");
    }
    for (int k = 0; k < n; ++k) b(i, k) = rows[i][k].get<double>();
  }
  return MakeLattice(b);
}

__int128 IntegerDeterminant(const IntMatrix& in) {
  const int n = static_cast<int>(in.rows());
  std::vector<std::vector<__int128>> a(n, std::vector<__int128>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = in(i, j);
  }
  __int128 prev = 1;
  int sign = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      int r = k + 1;
      while (r < n && a[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

bool SameLattice(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const Eigen::MatrixXd m = a.fullPivLu().solve(b);
  const Eigen::MatrixXd rounded = m.array().round().matrix();
  if ((m - rounded).cwiseAbs().maxCoeff() > tol) return false;
  if (rounded.cwiseAbs().maxCoeff() > 1e15) return false;
  const __int128 det = IntegerDeterminant(rounded.cast<std::int64_t>());
  return det == 1 || det == -1;
}

IntVector CanonicalSign(const IntVector& c) {
  for (int i = 0; i < c.size(); ++i) {
    if (c(i) > 0) return c;
    if (c(i) < 0) return -c;
  }
  return c;
}

bool PreferCoefficients(const IntVector& a, const IntVector& b) {
  const std::int64_t la = a.cwiseAbs().sum();
  const std::int64_t lb = b.cwiseAbs().sum();
  if (la != lb) return la < lb;
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) > b(i);
  }
  return false;
}

namespace {

bool NeedsExtendedPrecision(const Lattice& lattice) {
  return lattice.scaled_basis().cwiseAbs().maxCoeff() > kDoubleSafeMagnitude ||
         OrthogonalityDefect(lattice.basis()) > kMaxDoubleDefect;
}

}  // namespace

double OrthogonalityDefect(const Eigen::MatrixXd& basis) {
  const double det = std::abs(basis.determinant());
  if (!(det > 0.0)) return std::numeric_limits<double>::infinity();
  return basis.colwise().norm().prod() / det;
}

Lattice ReduceBasis(const Lattice& lattice) {
  if (NeedsExtendedPrecision(lattice)) {
    return ReduceBasis<Real50>(lattice.cast<Real50>()).cast<double>();
  }
  return ReduceBasis<double>(lattice);
}

ShortVector ShortestVector(const Lattice& lattice) {
  if (NeedsExtendedPrecision(lattice)) {
    return ShortestVector<Real50>(lattice.cast<Real50>());
  }
  return ShortestVector<double>(lattice);
}

double Systole(const Lattice& lattice) { return ShortestVector(lattice).norm; }

std::vector<ShortVector> CubePoints(const Lattice& lattice, double radius) {
  if (NeedsExtendedPrecision(lattice)) {
    return CubePoints<Real50>(lattice.cast<Real50>(), radius);
  }
  return CubePoints<double>(lattice, radius);
}

bool InKEps(const Lattice& lattice, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps must lie in (0, 1]");
  }
  return Systole(lattice) >= eps - 1e-9;
}

}  // namespace dirlab
