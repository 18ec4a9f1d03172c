#include <cmath>
#include <random>

#include "doctest.h"
#include "sle0/conformal.hpp"
#include "sle0/run.hpp"
#include "sle0/scene.hpp"
#include "sle0/trajectory.hpp"

using namespace sle0;

namespace {

const Complex I(0, 1);
const DomainMap fwd = DomainMap::half_plane_to_disk();
const DomainMap back = DomainMap::disk_to_half_plane();

SymmetricDivisor two_curves_with_pair() {
    return {Domain::half_plane,
            {SpherePoint::at(-1.0), SpherePoint::at(1.0)},
            {{SpherePoint::at(0.5 + I), Charge::half_integer(-1)},
             {SpherePoint::at(0.5 - I), Charge::half_integer(-1)},
             {SpherePoint::infinity(), Charge::half_integer(-2)}}};
}

}  // namespace

TEST_CASE("Cayley map values") {
    CHECK(std::abs(map_point(fwd, I)) < 1e-15);
    CHECK(std::abs(map_point(fwd, 0.0) + 1.0) < 1e-15);
    CHECK(std::abs(map_point(fwd, 1.0) + I) < 1e-15);
    CHECK(map_point(fwd, SpherePoint::infinity()) == SpherePoint::at(1.0));
    CHECK(map_point(back, SpherePoint::at(1.0)).is_infinite());
    CHECK(map_point(fwd, SpherePoint::at(-I)).is_infinite());
    try {
        map_point(back, 1.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::pole);
    }
    CHECK(fwd.source() == Domain::half_plane);
    CHECK(fwd.target() == Domain::disk);
    CHECK(fwd.inverse().direction() == DomainMap::Direction::disk_to_half_plane);
}

TEST_CASE("round trip on a grid") {
    double worst = 0.0;
    for (int a = 0; a < 100; ++a)
        for (int b = 0; b < 100; ++b) {
            const Complex z(-5.0 + 10.0 * a / 99, 0.01 + 5.0 * b / 99);
            const Complex w = map_point(fwd, z);
            CHECK(std::abs(w) < 1.0);
            worst = std::max(worst, std::abs(map_point(back, w) - z) / std::max(1.0, std::abs(z)));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("divisors map between domains") {
    const auto hp = two_curves_with_pair();
    const auto disk = map_divisor(fwd, hp);
    CHECK(disk.domain == Domain::disk);
    CHECK(validate(disk).ok());
    CHECK(disk.total_charge() == hp.total_charge());
    // The mirror pair 0.5 +- i becomes an inversion pair w, 1/conj(w).
    const Complex w = disk.marked[0].point.value();
    CHECK(std::abs(disk.marked[1].point.value() - 1.0 / std::conj(w)) < 1e-12);
    CHECK(disk.marked[2].point == SpherePoint::at(1.0));

    const auto again = map_divisor(back, disk);
    CHECK(again.domain == Domain::half_plane);
    for (std::size_t k = 0; k < hp.growth.size(); ++k)
        CHECK(std::abs(again.growth[k].value() - hp.growth[k].value()) < 1e-12);
    CHECK(again.marked[2].point.is_infinite());

    for (const auto& name : preset_names()) {
        const auto h = map_divisor(back, preset(name).divisor);
        CHECK(validate(h).ok());
    }
}

TEST_CASE("quadratic differentials push forward") {
    const auto hp = two_curves_with_pair();
    const auto qd = build_quadratic_differential(hp);
    const auto mapped = map_quadratic_differential(fwd, qd);
    CHECK(mapped.domain == Domain::disk);
    CHECK(mapped.finite_order_sum() + mapped.order_at_infinity == -4);

    // The mapped direction field is the image of the original one.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> re(-3, 3), im(0.05, 3);
    int checked = 0;
    while (checked < 200) {
        const Complex z(re(rng), im(rng));
        if (nearest_singularity_distance(qd, z) < 0.05) continue;
        const Complex u = direction_field(qd, z);
        const Complex image = map_direction(fwd.moebius(), z, u);
        const Complex v = direction_field(mapped, map_point(fwd, z));
        CHECK(std::abs(std::sin(std::arg(v) - std::arg(image))) < 1e-8);
        ++checked;
    }

    // Round trip restores the factor set.
    const auto round = map_quadratic_differential(back, mapped);
    REQUIRE(round.factors.size() == qd.factors.size());
    for (std::size_t k = 0; k < qd.factors.size(); ++k) {
        CHECK(std::abs(round.factors[k].point - qd.factors[k].point) < 1e-10);
        CHECK(round.factors[k].order == qd.factors[k].order);
    }
    CHECK(round.order_at_infinity == qd.order_at_infinity);
    CHECK(std::abs(std::sin(std::arg(round.phase) - std::arg(qd.phase))) < 1e-10);
}

TEST_CASE("fig2 keeps its point at infinity") {
    const auto qd = build_quadratic_differential(preset("fig2").divisor);
    CHECK(qd.order_at_infinity == -2);
    const auto hp = map_quadratic_differential(back, qd);
    const auto round = map_quadratic_differential(fwd, hp);
    CHECK(round.order_at_infinity == -2);
    CHECK(round.factors.size() == qd.factors.size());
}

TEST_CASE("tracing commutes with the map") {
    const auto hp = two_curves_with_pair();
    const auto qd = build_quadratic_differential(hp);
    const auto disk_qd = map_quadratic_differential(fwd, qd);
    TraceParams p;
    p.max_arc_length = 1.0;
    const Complex z0(-0.2, 0.7);
    const auto t = trace(qd, z0, direction_field(qd, z0), p);
    const auto image = map_polyline(fwd.moebius(), t.points);

    TraceParams pd = p;
    pd.max_arc_length = 5.0;  // arc length is not preserved; overshoot and compare pointwise
    const Complex w0 = map_point(fwd, z0);
    const auto td = trace(disk_qd, w0, map_direction(fwd.moebius(), z0, t.initial_dir), pd);
    double worst = 0.0;
    for (Complex w : image) worst = std::max(worst, polyline_distance(w, td.points));
    CHECK(worst < 10 * p.step);
}

TEST_CASE("half-plane frame for disk scenes") {
    for (const auto& name : preset_names()) {
        const auto d = preset(name).divisor;
        const auto frame = HalfPlaneFrame::for_divisor(d);
        const auto scene = to_half_plane(d);
        CHECK(scene.divisor.domain == Domain::half_plane);
        CHECK(validate(scene.divisor).ok());
        for (const auto& g : scene.divisor.growth) {
            REQUIRE(g.is_finite());
            CHECK(g.value().imag() == 0.0);
        }
        // The frame maps back onto the original points.
        for (std::size_t k = 0; k < d.growth.size(); ++k)
            CHECK(std::abs(frame.to_disk(scene.divisor.growth[k].value()) - d.growth[k].value()) < 1e-12);
        // Composition is the identity.
        const Complex w(0.2, -0.3);
        CHECK(std::abs(frame.to_disk(frame.to_half_plane(w)) - w) < 1e-14);
    }
}
