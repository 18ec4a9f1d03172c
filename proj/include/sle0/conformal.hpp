#pragma once

#include <span>
#include <vector>

#include "sle0/divisor.hpp"
#include "sle0/quad_diff.hpp"

namespace sle0 {

/// The Cayley pair w = (z - i)/(z + i) and z = i(1 + w)/(1 - w).
class DomainMap {
public:
    enum class Direction { half_plane_to_disk, disk_to_half_plane };

    explicit DomainMap(Direction direction) : direction_(direction) {}
    static DomainMap half_plane_to_disk() { return DomainMap(Direction::half_plane_to_disk); }
    static DomainMap disk_to_half_plane() { return DomainMap(Direction::disk_to_half_plane); }

    Direction direction() const noexcept { return direction_; }
    Domain source() const noexcept;
    Domain target() const noexcept;
    DomainMap inverse() const;
    const MoebiusMap& moebius() const;

private:
    Direction direction_;
};

/// Throws ErrorKind::pole at the map's pole (-i forward, 1 backward).
Complex map_point(const DomainMap& m, Complex z);
/// Infinity handled by kind: infinity <-> 1, and the pole goes to infinity.
SpherePoint map_point(const DomainMap& m, const SpherePoint& z);

/// Image divisor with the domain tag flipped. Re-validates; a failure on valid
/// input is an internal error.
SymmetricDivisor map_divisor(const DomainMap& m, const SymmetricDivisor& divisor);

/// Q~(w) = Q(z(w)) z'(w)^2: finite orders kept, the order at infinity
/// re-derived, and the phase carried over exactly by the chain rule.
QuadDifferential map_quadratic_differential(const DomainMap& m, const QuadDifferential& qd);
QuadDifferential map_quadratic_differential(const MoebiusMap& m, const QuadDifferential& qd, Domain target);

/// Unit image of the tangent direction u at z.
Complex map_direction(const MoebiusMap& m, Complex z, Complex u);

std::vector<Complex> map_polyline(const MoebiusMap& m, std::span<const Complex> points);

/// Disk-to-half-plane transport used to run the Loewner chain on disk scenes:
/// rotate the midpoint of the widest boundary gap to 1, then apply the inverse
/// Cayley map, so no boundary point of the divisor lands on infinity.
struct HalfPlaneFrame {
    MoebiusMap to_half_plane = MoebiusMap::identity();
    MoebiusMap to_disk = MoebiusMap::identity();

    static HalfPlaneFrame for_divisor(const SymmetricDivisor& disk_divisor);
};

}  // namespace sle0
