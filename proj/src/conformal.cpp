#include "sle0/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sle0 {

namespace {

const MoebiusMap& forward_cayley() {
    static const MoebiusMap m = MoebiusMap::cayley();
    return m;
}

const MoebiusMap& backward_cayley() {
    // z = i(1 + w)/(1 - w)
    static const MoebiusMap m(Complex(0, 1), Complex(0, 1), -1.0, 1.0);
    return m;
}

}  // namespace

Domain DomainMap::source() const noexcept {
    return direction_ == Direction::half_plane_to_disk ? Domain::half_plane : Domain::disk;
}

Domain DomainMap::target() const noexcept {
    return direction_ == Direction::half_plane_to_disk ? Domain::disk : Domain::half_plane;
}

DomainMap DomainMap::inverse() const {
    return DomainMap(direction_ == Direction::half_plane_to_disk ? Direction::disk_to_half_plane
                                                                 : Direction::half_plane_to_disk);
}

const MoebiusMap& DomainMap::moebius() const {
    return direction_ == Direction::half_plane_to_disk ? forward_cayley() : backward_cayley();
}

Complex map_point(const DomainMap& m, Complex z) { return m.moebius()(z); }

SpherePoint map_point(const DomainMap& m, const SpherePoint& z) { return m.moebius()(z); }

SymmetricDivisor map_divisor(const DomainMap& m, const SymmetricDivisor& divisor) {
    if (divisor.domain != m.source())
        throw Error(ErrorKind::configuration, std::string("map expects a ") + to_string(m.source()) + " divisor");
    SymmetricDivisor out = moebius_pushforward(divisor, m.moebius());
    if (out.domain != m.target() || (validate(divisor).ok() && !validate(out).ok()))
        throw Error(ErrorKind::internal, "Cayley image failed the image-domain symmetry check");
    return out;
}

QuadDifferential map_quadratic_differential(const MoebiusMap& m, const QuadDifferential& qd, Domain target) {
    QuadDifferential out;
    out.domain = target;

    std::optional<std::pair<FactorRole, std::size_t>> new_infinity;
    for (const auto& f : qd.factors) {
        const SpherePoint w = m(SpherePoint::at(f.point));
        if (w.is_infinite()) {
            new_infinity = std::make_pair(f.role, f.index);
            continue;
        }
        out.factors.push_back({w.value(), f.order, f.role, f.index});
    }
    // Whatever sat at infinity moves to m(infinity).
    const SpherePoint image_of_infinity = m(SpherePoint::infinity());
    if (image_of_infinity.is_finite() && qd.order_at_infinity != 0) {
        if (!qd.infinity_source)
            throw Error(ErrorKind::internal, "nonzero order at infinity without a divisor point there");
        out.factors.push_back({image_of_infinity.value(), qd.order_at_infinity, qd.infinity_source->first,
                               qd.infinity_source->second});
    } else if (image_of_infinity.is_infinite()) {
        new_infinity = qd.infinity_source;
    }
    out.infinity_source = new_infinity;
    out.order_at_infinity = -4 - out.finite_order_sum();

    // c~^2 prod(w - m(p))^k = c^2 prod(z - p)^k (dz/dw)^2 at a regular sample
    // point; both sides are the same rational function, so one point fixes c~.
    const MoebiusMap inv = m.inverse();
    const Complex candidates[] = {{0.3141, 0.2718}, {-0.577, 0.6931}, {0.1234, -0.4321}, {1.4142, 1.7321}};
    for (Complex w0 : candidates) {
        const SpherePoint z0 = inv(SpherePoint::at(w0));
        if (z0.is_infinite()) continue;
        out.phase = 1.0;
        if (nearest_singularity_distance(out, w0) < 1e-3 || nearest_singularity_distance(qd, z0.value()) < 1e-3)
            continue;
        const Complex dz = inv.derivative(w0);
        const Complex log_ratio = 2.0 * std::log(qd.phase) + 2.0 * log_root_product(qd, z0.value()) +
                                  2.0 * std::log(dz) - 2.0 * log_root_product(out, w0);
        double a = 0.5 * log_ratio.imag();
        a = std::remainder(a, std::numbers::pi);
        if (a <= -std::numbers::pi / 2) a += std::numbers::pi;
        out.phase = std::polar(1.0, a);
        return out;
    }
    throw Error(ErrorKind::internal, "no regular sample point for the phase transfer");
}

QuadDifferential map_quadratic_differential(const DomainMap& m, const QuadDifferential& qd) {
    if (qd.domain != m.source())
        throw Error(ErrorKind::configuration, std::string("map expects a ") + to_string(m.source()) + " differential");
    return map_quadratic_differential(m.moebius(), qd, m.target());
}

Complex map_direction(const MoebiusMap& m, Complex z, Complex u) {
    const Complex v = m.derivative(z) * u;
    return v / std::abs(v);
}

std::vector<Complex> map_polyline(const MoebiusMap& m, std::span<const Complex> points) {
    std::vector<Complex> out;
    out.reserve(points.size());
    for (Complex z : points) out.push_back(m(z));
    return out;
}

HalfPlaneFrame HalfPlaneFrame::for_divisor(const SymmetricDivisor& divisor) {
    if (divisor.domain != Domain::disk) throw Error(ErrorKind::configuration, "frame transport expects a disk divisor");
    constexpr double two_pi = 2 * std::numbers::pi;
    std::vector<double> angles;
    const auto add = [&](const SpherePoint& p) {
        if (p.is_finite() && std::abs(std::abs(p.value()) - 1.0) <= kSymmetryTolerance) {
            double a = std::fmod(std::arg(p.value()), two_pi);
            if (a < 0) a += two_pi;
            angles.push_back(a);
        }
    };
    for (const auto& g : divisor.growth) add(g);
    for (const auto& m : divisor.marked) add(m.point);
    std::sort(angles.begin(), angles.end());

    double mid = 0.0;  // with no boundary points any rotation will do
    double widest = -1.0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
        const double hi = k + 1 < angles.size() ? angles[k + 1] : angles[0] + two_pi;
        if (hi - angles[k] > widest + 1e-12) {
            widest = hi - angles[k];
            mid = 0.5 * (angles[k] + hi);
        }
    }
    HalfPlaneFrame frame;
    frame.to_half_plane = backward_cayley().compose(MoebiusMap::rotation(-mid));
    frame.to_disk = frame.to_half_plane.inverse();
    return frame;
}

}  // namespace sle0
