#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sle0/divisor.hpp"
#include "sle0/quad_diff.hpp"

namespace sle0 {

/// Piecewise-constant capacity rates nu_j(t). Each segment applies from its
/// start time until the next segment starts; before the first segment, and
/// with no segments at all, every rate is 1.
class Parametrization {
public:
    struct Segment {
        double start = 0.0;
        std::vector<double> rates;
        bool operator==(const Segment&) const = default;
    };

    Parametrization() = default;

    /// Segment starts must be strictly increasing and rates nonnegative.
    void add_segment(double start, std::vector<double> rates);

    std::vector<double> rates(double t, std::size_t n) const;
    /// First segment start strictly after t, or +infinity.
    double next_breakpoint(double t) const;
    /// Throws ErrorKind::configuration if a segment does not have n rates.
    void check(std::size_t n) const;

    const std::vector<Segment>& segments() const noexcept { return segments_; }
    bool operator==(const Parametrization&) const = default;

private:
    std::vector<Segment> segments_;
};

struct LoewnerProblem {
    /// Driving points in divisor order (half-plane coordinates).
    std::vector<double> x0;
    /// Finite marked points; charges may be any real.
    std::vector<MarkedPoint> marked;
    /// Position of each entry of `marked` in the divisor's marked list.
    std::vector<std::size_t> marked_index;
    Parametrization nu;
    /// Observer points carried along by g_t.
    std::vector<Complex> tracked;

    /// Requires a valid half-plane divisor with finite growth points.
    static LoewnerProblem from_divisor(const SymmetricDivisor& divisor, Parametrization nu = {});
};

struct TrackedPoint {
    Complex z0;
    Complex g;
    Complex log_dg;
    bool alive = true;
    double death_time = std::numeric_limits<double>::quiet_NaN();
};

struct LoewnerState {
    double t = 0.0;
    std::vector<double> x;
    std::vector<Complex> q;
    std::vector<TrackedPoint> tracked;
};

struct LoewnerOptions {
    double dt = 1e-4;
    double collision_tolerance = 1e-8;
    double min_dt = 1e-14;
    /// A step may close at most this fraction of any driving-point gap.
    double approach_fraction = 0.1;
    /// Same for an observer point approaching the hull; tighter because N_t
    /// is evaluated right up to the moment the point is swallowed.
    double tracked_fraction = 0.01;
    /// Times the state sequence must contain exactly.
    std::vector<double> checkpoints;

    void check() const;
};

struct CollisionInfo {
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::string what;
};

struct LoewnerRun {
    LoewnerProblem problem;
    std::vector<LoewnerState> states;
    std::optional<CollisionInfo> collision;
};

LoewnerState initial_state(const LoewnerProblem& problem);

/// x_j' = nu_j dlog Z/dx_j + sum_{k != j} 2 nu_k/(x_j - x_k).
std::vector<double> driving_velocity(const LoewnerProblem& problem, const LoewnerState& state);

/// One RK4 step of exactly dt with the rates in force at state.t. Throws
/// CollisionError when driving points (or a driving point and a marked
/// point) come within the collision tolerance or change order.
LoewnerState step(const LoewnerProblem& problem, const LoewnerState& state, double dt,
                  double collision_tolerance = 1e-8);

/// Adaptive evolution to T, stopping early at a collision (reported in the
/// run, not thrown). Degeneracy at t = 0 throws ErrorKind::configuration.
LoewnerRun evolve(const LoewnerProblem& problem, double T, const LoewnerOptions& options = {});

/// Cubic Hermite interpolation of the driving points between run states.
class DrivingPath {
public:
    explicit DrivingPath(const LoewnerRun& run);
    std::vector<double> at(double t) const;
    double t_end() const { return times_.back(); }

private:
    std::vector<double> times_;
    std::vector<std::vector<double>> x_;
    std::vector<std::vector<double>> v_;
};

struct HullOptions {
    double lift = 1e-6;
    /// Upper bound on sampled times per curve (state times, evenly thinned).
    std::size_t max_samples = 200;
};

struct HullResult {
    std::vector<double> times;
    /// curves[j][k] = gamma_j(times[k]).
    std::vector<std::vector<Complex>> curves;
};

/// gamma_j(t) = g_t^{-1}(x_j(t) + i lift) by reverse Loewner integration.
HullResult trace_hull(const LoewnerRun& run, const HullOptions& options = {});

struct MotionIntegralReport {
    std::vector<double> times;
    std::vector<Complex> values;
    /// max |N_t/N_0 - 1| over the sampled times.
    double max_relative_drift = 0.0;
    /// max ||N_t|/|N_0| - 1|.
    double modulus_drift = 0.0;
    /// max |arg N_t - arg N_0| with the argument tracked continuously.
    double argument_drift = 0.0;
    /// The point died before the end of the run; only alive samples are used.
    bool partial = false;
    double death_time = std::numeric_limits<double>::quiet_NaN();
};

/// N_t(z) = g'^2 prod (g - x_k)^2 prod (g - q_j)^{2 sigma_j}, evaluated in log
/// space for tracked point `tracked`.
MotionIntegralReport motion_integral(const LoewnerRun& run, std::size_t tracked);

/// Growth and marked positions of a state, indexed like the source divisor.
EvolvedPoints evolved_points(const LoewnerProblem& problem, const LoewnerState& state);

}  // namespace sle0
