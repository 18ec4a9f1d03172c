#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sle0/loewner.hpp"
#include "sle0/quad_diff.hpp"

using namespace sle0;

namespace {

const Complex I(0, 1);

SymmetricDivisor single_curve() {
    return {Domain::half_plane, {SpherePoint::at(0.0)}, {{SpherePoint::infinity(), Charge::half_integer(-3)}}};
}

SymmetricDivisor symmetric_pair() {
    return {Domain::half_plane,
            {SpherePoint::at(-1.0), SpherePoint::at(1.0)},
            {{SpherePoint::infinity(), Charge::half_integer(-4)}}};
}

SymmetricDivisor two_curves_with_pair() {
    return {Domain::half_plane,
            {SpherePoint::at(-1.0), SpherePoint::at(1.0)},
            {{SpherePoint::at(0.5 + I), Charge::half_integer(-1)},
             {SpherePoint::at(0.5 - I), Charge::half_integer(-1)},
             {SpherePoint::infinity(), Charge::half_integer(-2)}}};
}

// Driving point at 0 pulled into a charge -4 at 0.1: the gap obeys
// d(gap)/dt = 2/gap - 8/gap, so gap^2 = 0.01 - 12 t and they meet at t = 1/1200.
SymmetricDivisor attracting() {
    return {Domain::half_plane,
            {SpherePoint::at(0.0)},
            {{SpherePoint::at(0.1), Charge::half_integer(-4)}, {SpherePoint::infinity(), Charge::half_integer(1)}}};
}

}  // namespace

TEST_CASE("parametrization") {
    Parametrization nu;
    CHECK(nu.rates(3.0, 2) == std::vector<double>{1.0, 1.0});
    nu.add_segment(0.0, {1.0, 2.0});
    nu.add_segment(0.5, {0.0, 1.0});
    CHECK(nu.rates(0.2, 2) == std::vector<double>{1.0, 2.0});
    CHECK(nu.rates(0.5, 2) == std::vector<double>{0.0, 1.0});
    CHECK(nu.next_breakpoint(0.2) == 0.5);
    CHECK(std::isinf(nu.next_breakpoint(0.5)));
    CHECK_THROWS_AS(nu.add_segment(0.4, {1.0, 1.0}), Error);
    CHECK_THROWS_AS(nu.add_segment(0.7, {-1.0, 1.0}), Error);
    CHECK_THROWS_AS(nu.check(3), Error);
    CHECK_NOTHROW(nu.check(2));
}

TEST_CASE("single curve: driving point stays at 0 and g is the square root map") {
    auto problem = LoewnerProblem::from_divisor(single_curve());
    problem.tracked = {Complex(3, 3)};
    LoewnerOptions opt;
    opt.checkpoints = {0.25};
    const auto run = evolve(problem, 0.25, opt);
    CHECK_FALSE(run.collision);
    for (const auto& s : run.states) CHECK(s.x[0] == 0.0);
    const auto& last = run.states.back();
    CHECK(last.t == 0.25);
    const Complex z(3, 3), expected = std::sqrt(z * z + 1.0);
    CHECK(std::abs(last.tracked[0].g - expected) < 1e-8);
    CHECK(std::abs(std::exp(last.tracked[0].log_dg) - z / expected) < 1e-8);
}

TEST_CASE("single curve to T = 1 takes 10^4 steps") {
    const auto run = evolve(LoewnerProblem::from_divisor(single_curve()), 1.0, LoewnerOptions{});
    CHECK(run.states.size() == 10001u);
    CHECK(run.states.back().t == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::all_of(run.states.begin(), run.states.end(), [](const auto& s) { return s.x[0] == 0.0; }));
}

TEST_CASE("symmetric pair separates like sqrt(4 + 16 t)") {
    const auto run = evolve(LoewnerProblem::from_divisor(symmetric_pair()), 1.0, LoewnerOptions{});
    for (const auto& s : run.states) {
        CHECK(s.x[0] == -s.x[1]);
        CHECK(s.x[1] - s.x[0] == doctest::Approx(std::sqrt(4.0 + 16.0 * s.t)).epsilon(1e-10));
    }
}

TEST_CASE("driving velocity") {
    const auto problem = LoewnerProblem::from_divisor(symmetric_pair());
    const auto v = driving_velocity(problem, initial_state(problem));
    CHECK(v[0] == doctest::Approx(-2.0));
    CHECK(v[1] == doctest::Approx(2.0));
}

TEST_CASE("collisions are bracketed") {
    const auto problem = LoewnerProblem::from_divisor(attracting());
    const auto run = evolve(problem, 0.01, LoewnerOptions{});
    REQUIRE(run.collision);
    CHECK(run.collision->t_lo <= run.collision->t_hi);
    CHECK(std::abs(run.collision->t_hi - 1.0 / 1200) < 1e-8);
    CHECK(run.collision->t_hi - run.collision->t_lo < 1e-6);
    const auto& last = run.states.back();
    CHECK(last.q[0].real() - last.x[0] < 1e-6);
    CHECK(run.collision->what.find("marked point") != std::string::npos);

    // Stepping on from the last state throws.
    try {
        step(problem, last, 1e-6);
        FAIL("expected a collision");
    } catch (const CollisionError& e) {
        CHECK(e.t_lo() <= e.t_hi());
    }
}

TEST_CASE("degenerate start") {
    LoewnerProblem problem;
    problem.x0 = {0.0, 0.0};
    CHECK_THROWS_AS(evolve(problem, 0.1), Error);
}

TEST_CASE("checkpoints are hit exactly") {
    LoewnerOptions opt;
    opt.checkpoints = {0.0123, 0.05};
    const auto run = evolve(LoewnerProblem::from_divisor(two_curves_with_pair()), 0.06, opt);
    for (double c : opt.checkpoints)
        CHECK(std::any_of(run.states.begin(), run.states.end(), [&](const auto& s) { return s.t == c; }));
}

TEST_CASE("conjugation equivariance and the real line") {
    auto problem = LoewnerProblem::from_divisor(two_curves_with_pair());
    const Complex z(0.3, 0.8);
    problem.tracked = {z, std::conj(z)};
    const auto run = evolve(problem, 0.1, LoewnerOptions{});
    for (const auto& s : run.states) {
        CHECK(std::abs(s.tracked[0].g - std::conj(s.tracked[1].g)) < 1e-12 * std::max(1.0, std::abs(s.tracked[0].g)));
        CHECK(std::abs(s.q[0] - std::conj(s.q[1])) < 1e-12);
        CHECK(s.q[0].imag() > 0);
    }
}

TEST_CASE("hydrodynamic normalization at infinity") {
    auto problem = LoewnerProblem::from_divisor(symmetric_pair());
    const Complex z(0, 1e6);
    problem.tracked = {z};
    const auto run = evolve(problem, 0.1, LoewnerOptions{});
    const auto& s = run.states.back();
    // g(z) = z + 2 t (nu_1 + nu_2)/z + O(1/z^2).
    CHECK(std::abs(s.tracked[0].g - z - 2.0 * s.t * 2.0 / z) < 1e-6);
}

TEST_CASE("integral of motion") {
    SUBCASE("single curve, swallowed point") {
        auto problem = LoewnerProblem::from_divisor(single_curve());
        problem.tracked = {Complex(0, 2)};
        const auto run = evolve(problem, 1.0, LoewnerOptions{});
        const auto report = motion_integral(run, 0);
        CHECK(report.max_relative_drift < 1e-6);
        CHECK(report.partial);
        CHECK(report.death_time == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("two curves with an interior pair") {
        auto problem = LoewnerProblem::from_divisor(two_curves_with_pair());
        problem.tracked = {Complex(0, 2), Complex(3, 3)};
        const auto run = evolve(problem, 0.2, LoewnerOptions{});
        for (std::size_t k = 0; k < 2; ++k) {
            const auto report = motion_integral(run, k);
            CHECK_FALSE(report.partial);
            CHECK(report.max_relative_drift < 1e-8);
            CHECK(report.modulus_drift <= report.max_relative_drift + 1e-15);
        }
    }
    SUBCASE("fourth-order convergence") {
        auto problem = LoewnerProblem::from_divisor(two_curves_with_pair());
        problem.tracked = {Complex(3, 3)};
        std::vector<double> drift;
        for (double dt : {0.08, 0.04, 0.02}) {
            LoewnerOptions opt;
            opt.dt = dt;
            opt.tracked_fraction = 0.5;
            opt.approach_fraction = 0.5;
            drift.push_back(motion_integral(evolve(problem, 0.2, opt), 0).max_relative_drift);
        }
        const double order = std::log2(drift[1] / drift[2]);
        MESSAGE("drift ", drift[0], " ", drift[1], " ", drift[2], " order ", order);
        CHECK(order >= 3.5);
    }
}

TEST_CASE("hulls") {
    SUBCASE("single curve is the segment [0, 2i sqrt(t)]") {
        const auto run = evolve(LoewnerProblem::from_divisor(single_curve()), 1.0, LoewnerOptions{});
        const auto hull = trace_hull(run);
        CHECK(hull.times.size() <= 200u);
        for (std::size_t k = 0; k < hull.times.size(); ++k)
            CHECK(std::abs(hull.curves[0][k] - 2.0 * I * std::sqrt(hull.times[k])) < 1e-5);
    }
    SUBCASE("symmetric pair is mirror symmetric") {
        const auto run = evolve(LoewnerProblem::from_divisor(symmetric_pair()), 0.5, LoewnerOptions{});
        const auto hull = trace_hull(run);
        for (std::size_t k = 0; k < hull.times.size(); ++k) {
            CHECK(std::abs(hull.curves[0][k] + std::conj(hull.curves[1][k])) < 1e-6);
            CHECK(hull.curves[0][k].imag() >= 0.0);
        }
    }
}

TEST_CASE("pullback follows the driving points") {
    const auto d = two_curves_with_pair();
    const auto qd = build_quadratic_differential(d);
    const auto problem = LoewnerProblem::from_divisor(d);
    const auto run = evolve(problem, 0.05, LoewnerOptions{});
    const auto& s = run.states.back();
    const auto moved = pullback(qd, evolved_points(problem, s));
    for (const auto& f : moved.factors) {
        if (f.role == FactorRole::growth) CHECK(std::abs(f.point - s.x[f.index]) < 1e-15);
        CHECK(f.order == qd.factors[&f - moved.factors.data()].order);
    }
    // The boundary is still horizontal at the new positions.
    for (double x : {-5.0, 0.1, 4.0}) CHECK(std::abs(std::sin(std::arg(evaluate(moved, x)))) < 1e-9);
}
