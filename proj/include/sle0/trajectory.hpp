#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "sle0/quad_diff.hpp"

namespace sle0 {

struct TraceParams {
    double step = 1e-3;
    double max_arc_length = 50.0;
    double singularity_capture_radius = 1e-3;
    double domain_margin = 1e-6;
    bool adaptive = true;
    /// Halve the step when the field turns by more than this per step.
    double max_turn_per_step = 0.2;
    double spiral_threshold = 4.0 * std::numbers::pi;
    double angle_gap_threshold = 0.05;

    /// Throws ErrorKind::configuration on inconsistent values.
    void check() const;
    bool operator==(const TraceParams&) const = default;
};

enum class Terminal { reached_singularity, left_domain, exhausted_arc_length };

const char* to_string(Terminal terminal);

struct WindingEntry {
    Complex center;
    double angle = 0.0;
};

struct Trajectory {
    Complex start;
    Complex initial_dir;
    std::optional<std::size_t> growth_index;

    std::vector<Complex> points;
    std::vector<double> arc_lengths;

    Terminal terminal = Terminal::exhausted_arc_length;
    /// The captured singularity when terminal == reached_singularity.
    Complex terminal_point;
    int terminal_order = 0;

    /// Accumulated signed angle about every finite marked point.
    std::vector<WindingEntry> winding;

    double arc_length() const { return arc_lengths.empty() ? 0.0 : arc_lengths.back(); }
    double winding_about(Complex center) const;
};

/// Follows the horizontal line field from `start`. A start on a zero of Q is a
/// launch: `initial_dir` must be one of its separatrix directions and the
/// integration begins one capture radius away along it.
Trajectory trace(const QuadDifferential& qd, Complex start, Complex initial_dir, const TraceParams& params);

/// One trajectory per finite growth point, along the separatrix that points
/// most directly into the domain.
std::vector<Trajectory> launch_all(const QuadDifferential& qd, const TraceParams& params);

/// Direction of the interior-pointing separatrix chosen by launch_all.
Complex interior_separatrix(const QuadDifferential& qd, std::size_t factor);

std::vector<double> winding_increments(std::span<const Complex> polyline, Complex center);
double winding_angle(std::span<const Complex> polyline, Complex center);
double winding_angle(const Trajectory& trajectory, Complex center);

/// Mean unit tangent over the final min(1% of arc length, 10 capture radii).
double terminal_tangent(const Trajectory& trajectory, const TraceParams& params);

struct ConvergingPair {
    std::size_t first = 0;
    std::size_t second = 0;
    Complex terminal_point;
    double angle_gap = 0.0;
};

struct SpiralFlag {
    std::size_t trajectory = 0;
    Complex center;
    double total_winding = 0.0;
    bool monotone = false;
};

struct AsymptoticReport {
    std::vector<ConvergingPair> pairs;
    /// Every winding above the threshold; only monotone entries are spirals.
    std::vector<SpiralFlag> spirals;

    std::size_t spiral_count() const;
};

AsymptoticReport analyze(std::span<const Trajectory> trajectories, const QuadDifferential& qd,
                         const TraceParams& params);

}  // namespace sle0
