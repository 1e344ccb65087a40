#include "dirlab/random_lattices.hpp"

#include <cmath>

namespace dirlab {

Eigen::MatrixXd RandomPermutedUnitriangular(int n, std::mt19937_64& rng,
                                            double amplitude) {
  std::uniform_real_distribution<double> entry(-amplitude, amplitude);
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) t(i, j) = entry(rng);
  const auto perms = AllPermutations(n);
  std::uniform_int_distribution<std::size_t> pick(0, perms.size() - 1);
  const Eigen::MatrixXd p = PermutationMatrix(perms[pick(rng)]);
  return p * t * p.transpose();
}

Lattice RandomTestLattice(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> expo(-1.0, 1.0);
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a(i) = expo(rng);
  a.array() -= a.mean();
  const Eigen::MatrixXd u = RandomPermutedUnitriangular(n, rng);
  return Lattice::FromTrustedBasis(u * a.array().exp().matrix().asDiagonal());
}

IntMatrix RandomUnimodular(int n, std::mt19937_64& rng, int moves,
                           int max_multiplier) {
  IntMatrix m = IntMatrix::Identity(n, n);
  std::uniform_int_distribution<int> col(0, n - 1);
  std::uniform_int_distribution<int> mult(-max_multiplier, max_multiplier);
  for (int k = 0; k < moves; ++k) {
    const int i = col(rng);
    int j = col(rng);
    if (i == j) j = (j + 1) % n;
    m.col(i) += mult(rng) * m.col(j);
  }
  return m;
}

}  // namespace dirlab
