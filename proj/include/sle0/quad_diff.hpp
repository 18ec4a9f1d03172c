#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "sle0/divisor.hpp"

namespace sle0 {

/// Proximity radius around singularities for field evaluation.
inline constexpr double kFieldProximity = 1e-9;

enum class FactorRole { growth, marked };

/// One finite zero or pole of Q. `index` points back into the divisor's
/// growth or marked list.
struct Factor {
    Complex point;
    int order = 0;
    FactorRole role = FactorRole::growth;
    std::size_t index = 0;

    bool operator==(const Factor&) const = default;
};

/// Q(z) dz^2 = phase^2 * prod (z - p)^order dz^2, with the order at infinity
/// induced by the degree identity (finite orders + order at infinity = -4).
struct QuadDifferential {
    Domain domain = Domain::half_plane;
    std::vector<Factor> factors;
    int order_at_infinity = -4;
    /// Which divisor point sits at infinity, if any.
    std::optional<std::pair<FactorRole, std::size_t>> infinity_source;
    Complex phase{1.0, 0.0};

    int finite_order_sum() const;
};

struct SingularityInfo {
    Complex point;
    int order = 0;
    /// Zeros and simple poles: the |order+2| directions in which trajectories
    /// leave the point. Poles of order >= 3: the distinguished approach rays.
    /// Sorted in [0, 2pi).
    std::vector<double> separatrix_angles;
};

/// Requires every marked charge to be a half-integer. The phase is set by
/// normalize_phase on boundary arc 0.
QuadDifferential build_quadratic_differential(const SymmetricDivisor& divisor);

/// A regular point on boundary arc `arc` (arcs run between consecutive boundary
/// singularities, counter-clockwise on the circle, left to right on the line).
Complex boundary_reference_point(const QuadDifferential& qd, std::size_t arc);
std::size_t boundary_arc_count(const QuadDifferential& qd);

/// Unit c, arg c in (-pi/2, pi/2], with c^2 prod(z-p)^order tau^2 > 0 at the
/// reference point, tau the boundary tangent. Makes that arc horizontal.
Complex normalize_phase(const QuadDifferential& qd, std::size_t reference_arc = 0);
Complex normalize_phase_at(const QuadDifferential& qd, Complex reference_point);

/// sum (order/2) log(z - p) with principal-branch logarithms (phase excluded).
Complex log_root_product(const QuadDifferential& qd, Complex z);
/// prod (z - p)^(order/2), principal branches, phase excluded.
Complex root_product(const QuadDifferential& qd, Complex z);
/// phase^2 prod (z - p)^order, single-valued.
Complex evaluate(const QuadDifferential& qd, Complex z);

double nearest_singularity_distance(const QuadDifferential& qd, Complex z);

/// Unit u with Q(z) u^2 > 0. Sign is fixed by continuity with prev_dir when
/// given (Re(u conj(prev)) >= 0), otherwise arg u in [0, pi).
Complex direction_field(const QuadDifferential& qd, Complex z, std::optional<Complex> prev_dir = std::nullopt);

std::vector<SingularityInfo> classify_singularities(const QuadDifferential& qd);
SingularityInfo classify_singularity(const QuadDifferential& qd, std::size_t factor);

/// Positions of the divisor's points after the Loewner flow. Growth entries are
/// indexed like the divisor's growth list; marked entries are (marked index, position).
struct EvolvedPoints {
    std::vector<Complex> growth;
    std::vector<std::pair<std::size_t, Complex>> marked;
};

/// The member of QD(x(t), q(t)) with unchanged orders, phase re-normalized.
QuadDifferential pullback(const QuadDifferential& qd, const EvolvedPoints& evolved);

}  // namespace sle0
