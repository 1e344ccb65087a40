#pragma once

#include <cstdint>
#include <string>

namespace dirlab::suites {

struct SuiteResult {
  std::string name;
  long cases = 0;
  long failures = 0;
  std::string detail;

  bool passed() const { return failures == 0 && cases > 0; }
};

/// Systole against the coefficient-box oracle on `cases3` random 3x3 and
/// `cases4` random 4x4 test lattices; tolerance 1e-9.
SuiteResult SvpOracleSuite(long cases3, long cases4, std::uint64_t seed);

/// `cases` permuted-unitriangular Z^3 lattices (random basis) must give a
/// witness whose factorization reproduces the basis to 1e-6; `cases` random lattices with systole
/// below 1 - 1e-6 must give none.
SuiteResult HajosRoundTripSuite(long cases, std::uint64_t seed);

/// f_t u(v) = u(e^{(r1+1)t} v1, e^{(r2+1)t} v2) f_t to relative 1e-9.
SuiteResult ConjugationSuite(long cases, std::uint64_t seed);

/// Closed-form and finite-difference q'(0)q(0)^-1 against the displayed
/// formula, adjoint pattern for random h, and the rank test against exact
/// rational elimination over integer (x, y, z) in [-2, 2]^3 and all 24 sigma.
SuiteResult AdjointPatternSuite(long adjoint_cases, std::uint64_t seed);

}  // namespace dirlab::suites
