#include "sle0/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sle0 {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinStep = 1e-14;
constexpr int kBisections = 60;

double angle_between(Complex a, Complex b) { return std::abs(std::arg(a * std::conj(b))); }

Complex rk4_step(const QuadDifferential& qd, Complex z, Complex u, double h, Complex* end_dir = nullptr) {
    const Complex k1 = direction_field(qd, z, u);
    const Complex k2 = direction_field(qd, z + 0.5 * h * k1, k1);
    const Complex k3 = direction_field(qd, z + 0.5 * h * k2, k2);
    const Complex k4 = direction_field(qd, z + h * k3, k3);
    if (end_dir) *end_dir = k4;
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double outside_distance(const QuadDifferential& qd, Complex z, double margin) {
    switch (qd.domain) {
        case Domain::half_plane: return -z.imag() - margin;
        case Domain::disk: return std::abs(z) - 1.0 - margin;
        case Domain::sphere: return -1.0;
    }
    return -1.0;
}

// Smallest s in (0, h] where `event(rk4(z, s))` becomes positive, assuming it
// is non-positive at s = 0 and positive at s = h.
template <class Event>
double locate_event(const QuadDifferential& qd, Complex z, Complex u, double h, Event event) {
    double lo = 0.0, hi = h;
    for (int i = 0; i < kBisections; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (event(rk4_step(qd, z, u, mid)) > 0) hi = mid;
        else lo = mid;
    }
    return hi;
}

void accumulate_winding(std::vector<WindingEntry>& winding, Complex a, Complex b) {
    for (auto& w : winding) w.angle += std::arg((b - w.center) / (a - w.center));
}

}  // namespace

void TraceParams::check() const {
    if (!(step > 0)) throw Error(ErrorKind::configuration, "trace step must be positive");
    if (!(max_arc_length > 0)) throw Error(ErrorKind::configuration, "max arc length must be positive");
    if (!(domain_margin > 0)) throw Error(ErrorKind::configuration, "domain margin must be positive");
    if (!(singularity_capture_radius > domain_margin))
        throw Error(ErrorKind::configuration, "capture radius must exceed the domain margin");
    if (!(max_turn_per_step > 0)) throw Error(ErrorKind::configuration, "turn limit must be positive");
    if (!(spiral_threshold > 0) || !(angle_gap_threshold > 0))
        throw Error(ErrorKind::configuration, "analysis thresholds must be positive");
}

const char* to_string(Terminal terminal) {
    switch (terminal) {
        case Terminal::reached_singularity: return "reached_singularity";
        case Terminal::left_domain: return "left_domain";
        case Terminal::exhausted_arc_length: return "exhausted_arc_length";
    }
    return "unknown";
}

double Trajectory::winding_about(Complex center) const {
    for (const auto& w : winding)
        if (std::abs(w.center - center) <= 1e-12) return w.angle;
    return winding_angle(*this, center);
}

Trajectory trace(const QuadDifferential& qd, Complex start, Complex initial_dir, const TraceParams& params) {
    params.check();
    if (std::abs(initial_dir) == 0.0) throw Error(ErrorKind::bad_launch, "initial direction is zero");
    initial_dir /= std::abs(initial_dir);
    const double cap = params.singularity_capture_radius;

    Trajectory tr;
    tr.start = start;
    tr.initial_dir = initial_dir;
    for (const auto& f : qd.factors)
        if (f.role == FactorRole::marked) tr.winding.push_back({f.point, 0.0});

    std::optional<std::size_t> launch_factor;
    for (std::size_t i = 0; i < qd.factors.size(); ++i)
        if (std::abs(qd.factors[i].point - start) <= kDistinctTolerance) launch_factor = i;

    Complex z = start;
    tr.points.push_back(start);
    tr.arc_lengths.push_back(0.0);
    if (launch_factor) {
        const Factor& f = qd.factors[*launch_factor];
        if (f.order < 1) throw Error(ErrorKind::proximity, "cannot start a trajectory at a pole");
        const auto info = classify_singularity(qd, *launch_factor);
        const double dir_angle = std::arg(initial_dir);
        const bool ok = std::any_of(info.separatrix_angles.begin(), info.separatrix_angles.end(),
                                    [&](double a) { return angle_between(std::polar(1.0, a), initial_dir) <= 1e-3; });
        if (!ok)
            throw Error(ErrorKind::bad_launch, "initial direction " + std::to_string(dir_angle) +
                                                   " rad is not a separatrix direction");
        if (f.role == FactorRole::growth) tr.growth_index = f.index;
        z = start + cap * initial_dir;
        accumulate_winding(tr.winding, start, z);
        tr.points.push_back(z);
        tr.arc_lengths.push_back(cap);
    } else if (nearest_singularity_distance(qd, start) < kFieldProximity) {
        throw Error(ErrorKind::proximity, "start point is within 1e-9 of a singularity");
    }

    Complex u = direction_field(qd, z, initial_dir);
    double arc = tr.arc_lengths.back();
    double h = params.step;
    bool armed = !launch_factor.has_value();

    while (true) {
        if (arc >= params.max_arc_length * (1.0 - 1e-15)) {
            tr.terminal = Terminal::exhausted_arc_length;
            return tr;
        }
        const double dist = nearest_singularity_distance(qd, z);
        const double h_try = std::min({h, 0.25 * dist, params.max_arc_length - arc});

        Complex u_end;
        const Complex z_new = rk4_step(qd, z, u, h_try, &u_end);
        const double turn = angle_between(u_end, u);
        if (params.adaptive && turn > params.max_turn_per_step && h_try > kMinStep) {
            h = 0.5 * h_try;
            continue;
        }

        // Termination events inside this step.
        double event_s = std::numeric_limits<double>::infinity();
        Terminal event_kind = Terminal::exhausted_arc_length;
        std::size_t event_factor = 0;
        for (std::size_t i = 0; i < qd.factors.size(); ++i) {
            const Factor& f = qd.factors[i];
            if (f.order == 0) continue;
            if (!armed && launch_factor && i == *launch_factor) continue;
            if (std::abs(z_new - f.point) >= cap) continue;
            const Complex p = f.point;
            const double s = locate_event(qd, z, u, h_try, [&](Complex w) { return cap - std::abs(w - p); });
            if (s < event_s) {
                event_s = s;
                event_kind = Terminal::reached_singularity;
                event_factor = i;
            }
        }
        if (outside_distance(qd, z_new, params.domain_margin) > 0) {
            const double s = locate_event(qd, z, u, h_try,
                                          [&](Complex w) { return outside_distance(qd, w, params.domain_margin); });
            if (s < event_s) {
                event_s = s;
                event_kind = Terminal::left_domain;
            }
        }
        if (std::isfinite(event_s)) {
            const Complex z_end = rk4_step(qd, z, u, event_s);
            accumulate_winding(tr.winding, z, z_end);
            tr.points.push_back(z_end);
            tr.arc_lengths.push_back(arc + event_s);
            tr.terminal = event_kind;
            if (event_kind == Terminal::reached_singularity) {
                tr.terminal_point = qd.factors[event_factor].point;
                tr.terminal_order = qd.factors[event_factor].order;
            }
            return tr;
        }

        accumulate_winding(tr.winding, z, z_new);
        z = z_new;
        u = u_end;
        arc += h_try;
        tr.points.push_back(z);
        tr.arc_lengths.push_back(arc);
        if (!armed && std::abs(z - start) > 2.0 * cap) armed = true;
        if (params.adaptive && turn < 0.25 * params.max_turn_per_step) h = std::min(params.step, 2.0 * h);
    }
}

Complex interior_separatrix(const QuadDifferential& qd, std::size_t factor) {
    const Factor& f = qd.factors.at(factor);
    Complex normal;
    switch (qd.domain) {
        case Domain::half_plane: normal = Complex(0, 1); break;
        case Domain::disk: normal = -f.point / std::abs(f.point); break;
        case Domain::sphere: throw Error(ErrorKind::launch_selection, "no interior on the sphere");
    }
    const auto info = classify_singularity(qd, factor);
    double best = 1e-9;
    std::optional<Complex> chosen;
    for (double a : info.separatrix_angles) {
        const Complex d = std::polar(1.0, a);
        const double c = (d * std::conj(normal)).real();
        if (c > best) {
            best = c;
            chosen = d;
        }
    }
    if (!chosen) throw Error(ErrorKind::launch_selection, "no separatrix points into the domain");
    return *chosen;
}

std::vector<Trajectory> launch_all(const QuadDifferential& qd, const TraceParams& params) {
    if (qd.infinity_source && qd.infinity_source->first == FactorRole::growth)
        throw Error(ErrorKind::launch_selection, "cannot launch from a growth point at infinity");
    std::vector<std::size_t> growth;
    for (std::size_t i = 0; i < qd.factors.size(); ++i)
        if (qd.factors[i].role == FactorRole::growth) growth.push_back(i);
    std::sort(growth.begin(), growth.end(),
              [&](std::size_t a, std::size_t b) { return qd.factors[a].index < qd.factors[b].index; });

    std::vector<Trajectory> out;
    out.reserve(growth.size());
    for (std::size_t i : growth) out.push_back(trace(qd, qd.factors[i].point, interior_separatrix(qd, i), params));
    return out;
}

std::vector<double> winding_increments(std::span<const Complex> polyline, Complex center) {
    std::vector<double> inc;
    if (polyline.size() < 2) return inc;
    inc.reserve(polyline.size() - 1);
    for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
        const Complex a = polyline[k] - center, b = polyline[k + 1] - center;
        // Distance from center to the segment.
        const Complex d = b - a;
        double t = std::norm(d) > 0 ? -(std::conj(d) * a).real() / std::norm(d) : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        if (std::abs(a + t * d) <= 1e-9)
            throw Error(ErrorKind::ill_defined_winding, "polyline passes within 1e-9 of the center");
        inc.push_back(std::arg(b / a));
    }
    return inc;
}

double winding_angle(std::span<const Complex> polyline, Complex center) {
    double total = 0.0;
    for (double d : winding_increments(polyline, center)) total += d;
    return total;
}

double winding_angle(const Trajectory& trajectory, Complex center) { return winding_angle(trajectory.points, center); }

double terminal_tangent(const Trajectory& tr, const TraceParams& params) {
    const double length = tr.arc_length();
    const double window = std::min(0.01 * length, 10.0 * params.singularity_capture_radius);
    Complex sum = 0.0;
    for (std::size_t k = tr.points.size() - 1; k > 0; --k) {
        const Complex d = tr.points[k] - tr.points[k - 1];
        if (std::abs(d) > 0) sum += d / std::abs(d);
        if (tr.arc_lengths[k - 1] <= length - window) break;
    }
    return std::arg(sum);
}

std::size_t AsymptoticReport::spiral_count() const {
    return static_cast<std::size_t>(
        std::count_if(spirals.begin(), spirals.end(), [](const SpiralFlag& s) { return s.monotone; }));
}

AsymptoticReport analyze(std::span<const Trajectory> trajectories, const QuadDifferential& qd,
                         const TraceParams& params) {
    (void)qd;
    AsymptoticReport report;

    std::vector<double> tangents;
    tangents.reserve(trajectories.size());
    for (const auto& t : trajectories) tangents.push_back(terminal_tangent(t, params));

    // Only poles of order >= 3 have distinguished approach directions; a
    // shared direction anywhere else is a numerical coincidence.
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const auto& a = trajectories[i];
        if (a.terminal != Terminal::reached_singularity || a.terminal_order > -3) continue;
        for (std::size_t j = i + 1; j < trajectories.size(); ++j) {
            const auto& b = trajectories[j];
            if (b.terminal != Terminal::reached_singularity) continue;
            if (std::abs(a.terminal_point - b.terminal_point) > kDistinctTolerance) continue;
            const double gap = std::abs(std::remainder(tangents[i] - tangents[j], 2 * kPi));
            if (gap < params.angle_gap_threshold) report.pairs.push_back({i, j, a.terminal_point, gap});
        }
    }

    for (std::size_t k = 0; k < trajectories.size(); ++k) {
        for (const auto& w : trajectories[k].winding) {
            if (std::abs(w.angle) <= params.spiral_threshold) continue;
            const auto inc = winding_increments(trajectories[k].points, w.center);
            const std::size_t from = inc.size() / 4;
            const double sign = w.angle > 0 ? 1.0 : -1.0;
            const bool monotone =
                std::all_of(inc.begin() + static_cast<std::ptrdiff_t>(from), inc.end(), [sign](double d) { return d * sign >= 0; });
            report.spirals.push_back({k, w.center, w.angle, monotone});
        }
    }
    return report;
}

}  // namespace sle0
