#pragma once

#include <random>

#include "dirlab/hajos.hpp"
#include "dirlab/lattice.hpp"

namespace dirlab {

/// Random element of U+_sigma for a uniformly chosen sigma, off-diagonal
/// entries uniform in [-amplitude, amplitude].
Eigen::MatrixXd RandomPermutedUnitriangular(int n, std::mt19937_64& rng,
                                            double amplitude = 2.0);

/// Test family: permuted unitriangular * diag(e^{a_1}, ..., e^{a_n}) with a_i
/// uniform in [-1, 1] and shifted to sum to 0.
Lattice RandomTestLattice(int n, std::mt19937_64& rng);

/// Random integral matrix of determinant 1 built from elementary column moves.
IntMatrix RandomUnimodular(int n, std::mt19937_64& rng, int moves = 12,
                           int max_multiplier = 3);

}  // namespace dirlab
