#pragma once

#include <cstdint>
#include <random>

#include "sle0/divisor.hpp"

namespace sle0 {

using Rng = std::mt19937_64;

/// A valid divisor with 1-3 growth points, up to two mirror pairs of interior
/// marked points and one or two boundary marked points, all charges
/// half-integers with the boundary charge closing neutrality. Every point is
/// finite and at least `separation` from the others.
SymmetricDivisor random_divisor(Rng& rng, Domain domain, double separation = 0.05);

/// A Möbius map with random complex coefficients that keeps every point of
/// `divisor` finite and well away from the pole.
MoebiusMap random_moebius(Rng& rng, const SymmetricDivisor& divisor);

/// log of |C[phi sigma]| prod |phi'(z_j)|^{lambda_j} / |C[sigma]|; zero for an
/// exact Möbius-invariant differential. All points must be finite.
double moebius_invariance_log_residual(const SymmetricDivisor& divisor, const MoebiusMap& map);

}  // namespace sle0
