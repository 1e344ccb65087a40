#pragma once

#include <optional>
#include <vector>

#include "dirlab/lattice.hpp"

namespace dirlab {

/// Lattices with systole at least 1 - kHajosTolerance are treated as K_1.
inline constexpr double kHajosTolerance = 1e-6;

/// Permutation of {0, ..., n-1}; sigma[i] is the image of i.
using Permutation = std::vector<int>;

/// All n! permutations in lexicographic order.
std::vector<Permutation> AllPermutations(int n);

/// Matrix with entry (sigma[i], i) = 1; conjugating an upper triangular matrix
/// T by it gives P T P^-1 with entries (sigma[i], sigma[j]) = T(i, j).
Eigen::MatrixXd PermutationMatrix(const Permutation& sigma);

/// True when `m` lies in the group U+_sigma generated by the one-parameter
/// subgroups U_{sigma(i) sigma(j)}, i < j.
bool IsPermutedUnitriangular(const Eigen::MatrixXd& m, const Permutation& sigma,
                             double tol = 1e-9);

/// Factorization basis = unipotent * integral_part with unipotent in U+_sigma
/// and integral_part in GL_n(Z).
struct HajosWitness {
  Permutation sigma;
  Eigen::MatrixXd unipotent;
  IntMatrix integral_part;
};

/// Attempts basis * M = P_sigma T P_sigma^-1 (T upper unitriangular, M
/// unimodular) by integral column reduction in sigma-order, rows processed
/// from the last pivot to the first. Returns nothing when some pivot row is
/// not integral or its gcd is not 1. The unipotent factor is normalized so
/// that its entries above the sigma-diagonal lie in [0, 1).
std::optional<HajosWitness> TryHajosFactorization(const Lattice& lattice,
                                                  const Permutation& sigma);

/// Witness that `lattice` is in K_1. Empty when the systole is below
/// 1 - kHajosTolerance. Throws kWitnessNotFound if the systole is large
/// enough but no permutation factors; this signals precision loss.
std::optional<HajosWitness> FindHajosWitness(const Lattice& lattice);

}  // namespace dirlab
