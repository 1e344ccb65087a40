#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace dirlab::oracles {

namespace {

using Rational = boost::multiprecision::cpp_rational;

std::vector<long> Bounds(const Eigen::MatrixXd& basis, double R) {
  const Eigen::MatrixXd inv = basis.inverse();
  std::vector<long> b(basis.cols());
  for (int i = 0; i < basis.cols(); ++i) {
    b[i] = static_cast<long>(std::floor(inv.row(i).cwiseAbs().sum() * R));
  }
  return b;
}

double MinColumnNorm(const Eigen::MatrixXd& basis) {
  double r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < basis.cols(); ++i) {
    r = std::min(r, basis.col(i).cwiseAbs().maxCoeff());
  }
  return r;
}

// Calls visit(c) for every nonzero c in the box whose first nonzero entry is
// positive.
template <typename Visit>
void ForEachHalfBox(const std::vector<long>& b, Visit visit) {
  const int n = static_cast<int>(b.size());
  std::vector<long> c(n);
  for (int i = 0; i < n; ++i) c[i] = -b[i];
  while (true) {
    int lead = 0;
    while (lead < n && c[lead] == 0) ++lead;
    if (lead < n && c[lead] > 0) visit(c);
    int k = n - 1;
    while (k >= 0 && c[k] == b[k]) {
      c[k] = -b[k];
      --k;
    }
    if (k < 0) break;
    ++c[k];
  }
}

Rational RoundTowardZeroTies(const Rational& x) {
  using boost::multiprecision::numerator;
  using boost::multiprecision::denominator;
  // floor(x)
  boost::multiprecision::cpp_int n = numerator(x), d = denominator(x);
  boost::multiprecision::cpp_int fl = n / d;
  if (n < 0 && fl * d != n) fl -= 1;
  const Rational diff = x - Rational(fl);
  const Rational half(1, 2);
  if (diff > half) return Rational(fl + 1);
  if (diff < half) return Rational(fl);
  return x > 0 ? Rational(fl) : Rational(fl + 1);
}

Rational Abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

}  // namespace

double BoxVolume(const Eigen::MatrixXd& basis, double R) {
  double v = 1.0;
  for (long b : Bounds(basis, R)) v *= 2.0 * b + 1.0;
  return v;
}

double BruteForceSystole(const Eigen::MatrixXd& basis) {
  const double R = MinColumnNorm(basis);
  double best = R;
  ForEachHalfBox(Bounds(basis, R), [&](const std::vector<long>& c) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(basis.rows());
    for (int i = 0; i < basis.cols(); ++i) x += static_cast<double>(c[i]) * basis.col(i);
    best = std::min(best, x.cwiseAbs().maxCoeff());
  });
  return best;
}

long BruteForceCubeClasses(const Eigen::MatrixXd& basis, double R) {
  long count = 0;
  ForEachHalfBox(Bounds(basis, R), [&](const std::vector<long>& c) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(basis.rows());
    for (int i = 0; i < basis.cols(); ++i) x += static_cast<double>(c[i]) * basis.col(i);
    if (x.cwiseAbs().maxCoeff() < R) ++count;
  });
  return count;
}

RationalDirichlet ExactDirichlet(const std::vector<std::int64_t>& num,
                                 std::int64_t den, std::int64_t Q) {
  const int n = static_cast<int>(num.size());
  for (std::int64_t q = 1; q <= Q; ++q) {
    RationalDirichlet out{q, {}};
    Rational worst = 0;
    for (int i = 0; i < n; ++i) {
      const Rational x = Rational(num[i]) * q / den;
      const Rational p = RoundTowardZeroTies(x);
      out.p.push_back(static_cast<std::int64_t>(p));
      worst = std::max(worst, Abs(x - p));
    }
    Rational power = 1;
    for (int i = 0; i < n; ++i) power *= worst;
    if (power * Q < 1) return out;
  }
  throw std::logic_error("Dirichlet's theorem violated");
}

double ExactUnweightedScore(const std::array<std::int64_t, 2>& num,
                            std::int64_t den, std::int64_t q_max) {
  Rational best = -1;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    Rational worst = 0;
    for (std::int64_t a : num) {
      const Rational x = Rational(a) * q / den;
      worst = std::max(worst, Abs(x - RoundTowardZeroTies(x)));
    }
    const Rational value = Rational(q) * worst * worst;
    if (best < 0 || value < best) best = value;
  }
  return static_cast<double>(best);
}

bool NaiveSigmaImprovement(double v1, double v2, double sigma, double r1,
                           double r2, double Q) {
  for (long q = 1; q < sigma * Q; ++q) {
    const double d1 = std::abs(q * v1 - std::nearbyint(q * v1));
    const double d2 = std::abs(q * v2 - std::nearbyint(q * v2));
    if (d1 < sigma * std::pow(Q, -r1) && d2 < sigma * std::pow(Q, -r2)) {
      return true;
    }
  }
  return false;
}

Eigen::Matrix4d DisplayedAdjointPattern(const std::array<double, 8>& k) {
  const double a = k[0], b = k[1], c = k[2], d = k[3];
  const double e = k[4], f = k[5], g = k[6], h = k[7];
  Eigen::Matrix4d m;
  m << a, b, -a - b + e, f,
       c, d, -c - d + e, f,
       0, 0, e, f,
       0, 0, g, h;
  return m;
}

Eigen::Matrix4d DisplayedLogDerivative(double x, double y, double z) {
  Eigen::Matrix4d m;
  m << x, y, z, 0,
       x, y, z, 0,
       -x, -y, -z, 0,
       0, 0, 0, z - x - y;
  return m;
}

bool ExactDisplayedOutside(const std::array<int, 3>& xyz,
                           const std::array<int, 4>& sigma) {
  // Generators as rational 16-vectors: the pattern at 7 parameter choices
  // spanning a + d + e + h = 0, then E_{sigma(a) sigma(b)}, a < b.
  std::vector<std::array<double, 8>> params = {
      {1, 0, 0, 0, 0, 0, 0, -1}, {0, 0, 0, 1, 0, 0, 0, -1},
      {0, 0, 0, 0, 1, 0, 0, -1}, {0, 1, 0, 0, 0, 0, 0, 0},
      {0, 0, 1, 0, 0, 0, 0, 0},  {0, 0, 0, 0, 0, 1, 0, 0},
      {0, 0, 0, 0, 0, 0, 1, 0}};
  std::vector<std::vector<Rational>> rows;
  auto push = [&rows](const Eigen::Matrix4d& m) {
    std::vector<Rational> r(16);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) r[4 * i + j] = Rational(static_cast<long>(m(i, j)));
    }
    rows.push_back(r);
  };
  for (const auto& k : params) push(DisplayedAdjointPattern(k));
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      Eigen::Matrix4d e = Eigen::Matrix4d::Zero();
      e(sigma[a], sigma[b]) = 1;
      push(e);
    }
  }
  auto rank = [](std::vector<std::vector<Rational>> m) {
    int r = 0;
    for (int col = 0; col < 16 && r < static_cast<int>(m.size()); ++col) {
      int piv = r;
      while (piv < static_cast<int>(m.size()) && m[piv][col] == 0) ++piv;
      if (piv == static_cast<int>(m.size())) continue;
      std::swap(m[piv], m[r]);
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (static_cast<int>(i) == r || m[i][col] == 0) continue;
        const Rational f = m[i][col] / m[r][col];
        for (int j = 0; j < 16; ++j) m[i][j] -= f * m[r][j];
      }
      ++r;
    }
    return r;
  };
  const int base = rank(rows);
  push(DisplayedLogDerivative(xyz[0], xyz[1], xyz[2]));
  return rank(rows) > base;
}

}  // namespace dirlab::oracles
