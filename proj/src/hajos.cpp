#include "dirlab/hajos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dirlab/reduction.hpp"
#include "dirlab/svp.hpp"

namespace dirlab {

std::vector<Permutation> AllPermutations(int n) {
  Permutation sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<Permutation> out;
  do {
    out.push_back(sigma);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return out;
}

Eigen::MatrixXd PermutationMatrix(const Permutation& sigma) {
  const int n = static_cast<int>(sigma.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) p(sigma[i], i) = 1.0;
  return p;
}

bool IsPermutedUnitriangular(const Eigen::MatrixXd& m, const Permutation& sigma,
                             double tol) {
  const Eigen::MatrixXd p = PermutationMatrix(sigma);
  const Eigen::MatrixXd t = p.transpose() * m * p;
  for (int i = 0; i < t.rows(); ++i) {
    if (std::abs(t(i, i) - 1.0) > tol) return false;
    for (int j = 0; j < i; ++j) {
      if (std::abs(t(i, j)) > tol) return false;
    }
  }
  return true;
}

namespace {

constexpr double kIntegralTol = 1e-6;
constexpr double kCanonicalSlack = 1e-9;

// Column operations on columns [0, k] of `b` and `m` that clear row k except
// for a single entry left at column k. Fails unless that entry is +-1.
bool ClearRow(int k, Eigen::MatrixXd& b, IntMatrix& m) {
  std::vector<std::int64_t> a(k + 1);
  for (int j = 0; j <= k; ++j) {
    const double x = b(k, j);
    const double r = std::round(x);
    if (std::abs(x - r) > kIntegralTol || std::abs(r) > 1e15) return false;
    a[j] = static_cast<std::int64_t>(r);
  }
  auto sub = [&](int dst, int src, std::int64_t q) {
    b.col(dst) -= static_cast<double>(q) * b.col(src);
    m.col(dst) -= q * m.col(src);
    a[dst] -= q * a[src];
  };
  while (true) {
    int pivot = -1;
    for (int j = 0; j <= k; ++j) {
      if (a[j] != 0 && (pivot < 0 || std::llabs(a[j]) < std::llabs(a[pivot]))) {
        pivot = j;
      }
    }
    if (pivot < 0) return false;
    bool done = true;
    for (int j = 0; j <= k; ++j) {
      if (j == pivot || a[j] == 0) continue;
      sub(j, pivot, a[j] / a[pivot]);
      if (a[j] != 0) done = false;
    }
    if (!done) continue;
    if (pivot != k) {
      b.col(pivot).swap(b.col(k));
      m.col(pivot).swap(m.col(k));
      std::swap(a[pivot], a[k]);
    }
    if (std::llabs(a[k]) != 1) return false;
    if (a[k] < 0) {
      b.col(k) = -b.col(k);
      m.col(k) = -m.col(k);
      a[k] = 1;
    }
    for (int j = 0; j < k; ++j) b(k, j) = 0.0;
    b(k, k) = 1.0;
    return true;
  }
}

}  // namespace

std::optional<HajosWitness> TryHajosFactorization(const Lattice& lattice,
                                                  const Permutation& sigma) {
  const int n = lattice.dim();
  const Eigen::MatrixXd basis = lattice.scaled_basis();
  const Eigen::MatrixXd p = PermutationMatrix(sigma);
  Eigen::MatrixXd b = p.transpose() * LllReduce<double>(basis).basis;
  IntMatrix m = IntMatrix::Identity(n, n);
  for (int k = n - 1; k >= 0; --k) {
    if (!ClearRow(k, b, m)) return std::nullopt;
  }
  // Canonical representative: off-diagonal entries in [0, 1).
  for (int j = 1; j < n; ++j) {
    for (int i = j - 1; i >= 0; --i) {
      const double q = std::floor(b(i, j) + kCanonicalSlack);
      if (q == 0.0) continue;
      b.col(j) -= q * b.col(i);
      m.col(j) -= static_cast<std::int64_t>(q) * m.col(i);
    }
  }
  HajosWitness w;
  w.sigma = sigma;
  w.unipotent = p * b * p.transpose();
  const Eigen::MatrixXd z = w.unipotent.fullPivLu().solve(basis);
  const Eigen::MatrixXd zr = z.array().round().matrix();
  if ((z - zr).cwiseAbs().maxCoeff() > kIntegralTol) return std::nullopt;
  if (std::abs(std::abs(zr.determinant()) - 1.0) > 1e-9) return std::nullopt;
  if ((w.unipotent * zr - basis).cwiseAbs().maxCoeff() > kIntegralTol) {
    return std::nullopt;
  }
  w.integral_part = zr.cast<std::int64_t>();
  return w;
}

std::optional<HajosWitness> FindHajosWitness(const Lattice& lattice) {
  if (Systole(lattice) < 1.0 - kHajosTolerance) return std::nullopt;
  for (const Permutation& sigma : AllPermutations(lattice.dim())) {
    if (auto w = TryHajosFactorization(lattice, sigma)) return w;
  }
  throw Error(ErrorCode::kWitnessNotFound,
              "systole >= 1 but no permuted unitriangular factorization");
}

}  // namespace dirlab
