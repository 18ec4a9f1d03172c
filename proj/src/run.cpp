#include "sle0/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sle0/random.hpp"
#include "sle0/render.hpp"

namespace sle0 {

namespace {

using Json = nlohmann::ordered_json;

Json pair_of(Complex z) { return Json::array({z.real(), z.imag()}); }

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::configuration, "cannot write " + path.string());
    out << text;
}

// 4-point centered difference of log|Z| in x_j.
double dlog_fd(std::vector<Complex> x, std::span<const MarkedPoint> marked, std::size_t j) {
    double nearest = 1e300;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (k != j) nearest = std::min(nearest, std::abs(x[j] - x[k]));
    for (const auto& m : marked)
        if (m.point.is_finite()) nearest = std::min(nearest, std::abs(x[j] - m.point.value()));
    const double h = 1e-3 * std::min(nearest, 1.0);
    const Complex x0 = x[j];
    const auto f = [&](double s) {
        x[j] = x0 + s;
        return log_partition_abs(x, marked);
    };
    const double d = (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
    x[j] = x0;
    return d;
}

double dlog_relative_error(const SymmetricDivisor& hp) {
    std::vector<double> xr;
    std::vector<Complex> xc;
    for (const auto& g : hp.growth) {
        xr.push_back(g.value().real());
        xc.emplace_back(g.value().real(), 0.0);
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < xr.size(); ++j) {
        const double exact = dlog_partition(xr, hp.marked, j);
        const double fd = dlog_fd(xc, hp.marked, j);
        worst = std::max(worst, std::abs(fd - exact) / std::max(std::abs(exact), 1e-8));
    }
    return worst;
}

bool all_finite(const SymmetricDivisor& d) {
    return std::all_of(d.growth.begin(), d.growth.end(), [](const SpherePoint& p) { return p.is_finite(); }) &&
           std::all_of(d.marked.begin(), d.marked.end(), [](const MarkedPoint& m) { return m.point.is_finite(); });
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return exit_validation;
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        switch (err->kind()) {
            case ErrorKind::configuration:
            case ErrorKind::degenerate_configuration:
            case ErrorKind::symmetry_violation:
            case ErrorKind::unsupported_charge:
            case ErrorKind::invalid_reference:
            case ErrorKind::bad_launch:
            case ErrorKind::launch_selection: return exit_validation;
            default: return exit_runtime;
        }
    }
    return exit_runtime;
}

HalfPlaneScene to_half_plane(const SymmetricDivisor& divisor) {
    if (divisor.domain == Domain::half_plane) return {divisor, std::nullopt};
    const HalfPlaneFrame frame = HalfPlaneFrame::for_divisor(divisor);
    SymmetricDivisor hp = moebius_pushforward(divisor, frame.to_half_plane);
    if (hp.domain != Domain::half_plane) throw Error(ErrorKind::internal, "disk transport did not land on the half-plane");
    // Remove rounding so boundary points are exactly real and mirror pairs exact conjugates.
    const auto snap = [](SpherePoint& p) {
        if (p.is_finite() && std::abs(p.value().imag()) <= kSymmetryTolerance * std::max(1.0, std::abs(p.value())))
            p = SpherePoint::at(Complex(p.value().real(), 0.0));
    };
    for (auto& g : hp.growth) snap(g);
    for (auto& m : hp.marked) snap(m.point);
    for (auto& m : hp.marked) {
        if (m.point.is_infinite() || m.point.value().imag() <= 0) continue;
        for (auto& o : hp.marked)
            if (o.point.is_finite() && o.point.value().imag() < 0 &&
                std::abs(o.point.value() - std::conj(m.point.value())) <= 1e-8)
                o.point = SpherePoint::at(std::conj(m.point.value()));
    }
    return {hp, frame};
}

LoewnerOutcome run_loewner(const SceneConfig& config, bool hull, bool motion) {
    LoewnerOutcome out;
    out.scene = to_half_plane(config.divisor);
    LoewnerProblem problem = LoewnerProblem::from_divisor(out.scene.divisor, config.rates);
    if (motion) problem.tracked = config.loewner.motion_points;
    LoewnerOptions options;
    options.dt = config.loewner.dt;
    out.run = evolve(problem, config.loewner.T, options);
    if (hull) out.hull = trace_hull(out.run, {config.loewner.lift, config.loewner.hull_samples});
    if (motion)
        for (std::size_t k = 0; k < problem.tracked.size(); ++k) out.motion.push_back(motion_integral(out.run, k));
    return out;
}

RunResult run_scene(const SceneConfig& config) {
    check_config(config);
    RunResult r;
    if (config.outputs.needs_trajectories()) {
        r.qd = build_quadratic_differential(config.divisor);
        r.trajectories = launch_all(*r.qd, config.trace);
        r.analysis = analyze(r.trajectories, *r.qd, config.trace);
    }
    if (config.outputs.needs_loewner()) r.loewner = run_loewner(config, config.outputs.hull_csv, config.outputs.motion_report);
    return r;
}

std::string analysis_report(const SceneConfig& config, const RunResult& result) {
    Json j;
    j["scene"] = config.name;
    j["domain"] = to_string(config.divisor.domain);
    if (result.qd) j["phase_arg"] = std::arg(result.qd->phase);
    Json trs = Json::array();
    for (std::size_t k = 0; k < result.trajectories.size(); ++k) {
        const auto& t = result.trajectories[k];
        Json e;
        e["id"] = k;
        e["growth_index"] = t.growth_index ? Json(*t.growth_index) : Json(nullptr);
        e["start"] = pair_of(t.start);
        e["terminal"] = to_string(t.terminal);
        if (t.terminal == Terminal::reached_singularity) {
            e["terminal_point"] = pair_of(t.terminal_point);
            e["terminal_order"] = t.terminal_order;
        }
        e["arc_length"] = t.arc_length();
        e["samples"] = t.points.size();
        e["terminal_tangent"] = terminal_tangent(t, config.trace);
        Json w = Json::array();
        for (const auto& entry : t.winding) w.push_back({{"center", pair_of(entry.center)}, {"angle", entry.angle}});
        e["winding"] = w;
        trs.push_back(e);
    }
    j["trajectories"] = trs;
    Json pairs = Json::array(), spirals = Json::array();
    if (result.analysis) {
        for (const auto& p : result.analysis->pairs)
            pairs.push_back({{"first", p.first},
                             {"second", p.second},
                             {"terminal_point", pair_of(p.terminal_point)},
                             {"angle_gap", p.angle_gap}});
        for (const auto& s : result.analysis->spirals)
            spirals.push_back({{"trajectory", s.trajectory},
                               {"center", pair_of(s.center)},
                               {"total_winding", s.total_winding},
                               {"monotone", s.monotone}});
    }
    j["converging_pairs"] = pairs;
    j["spirals"] = spirals;
    return j.dump(2) + "\n";
}

std::string motion_report(const SceneConfig& config, const LoewnerOutcome& outcome) {
    Json j;
    j["scene"] = config.name;
    j["T"] = config.loewner.T;
    j["dt"] = config.loewner.dt;
    j["states"] = outcome.run.states.size();
    j["t_end"] = outcome.run.states.back().t;
    if (outcome.run.collision)
        j["collision"] = {{"t_lo", outcome.run.collision->t_lo},
                          {"t_hi", outcome.run.collision->t_hi},
                          {"what", outcome.run.collision->what}};
    else
        j["collision"] = nullptr;
    Json pts = Json::array();
    for (std::size_t k = 0; k < outcome.motion.size(); ++k) {
        const auto& m = outcome.motion[k];
        Json e;
        e["z"] = pair_of(config.loewner.motion_points[k]);
        e["N0"] = m.values.empty() ? Json(nullptr) : pair_of(m.values.front());
        e["samples"] = m.times.size();
        e["max_relative_drift"] = m.max_relative_drift;
        e["modulus_drift"] = m.modulus_drift;
        e["argument_drift"] = m.argument_drift;
        e["partial"] = m.partial;
        e["death_time"] = m.partial ? Json(m.death_time) : Json(nullptr);
        pts.push_back(e);
    }
    j["points"] = pts;
    return j.dump(2) + "\n";
}

std::vector<std::string> write_artifacts(const SceneConfig& config, const RunResult& result,
                                         const std::filesystem::path& out) {
    std::filesystem::create_directories(out);
    std::vector<std::string> files;
    const auto emit = [&](const std::string& name, const std::string& text) {
        write_file(out / name, text);
        files.push_back(name);
    };
    emit("scene.yaml", serialize(config));
    if (config.outputs.field_svg && result.qd)
        emit("field.svg", render_svg(*result.qd, config.divisor, result.trajectories));
    if (config.outputs.trajectories_csv)
        for (std::size_t k = 0; k < result.trajectories.size(); ++k)
            emit("trajectory_" + std::to_string(k) + ".csv", trajectory_csv(result.trajectories[k]));
    if (config.outputs.analysis_report && result.qd) emit("analysis.json", analysis_report(config, result));
    if (result.loewner) {
        const auto& lo = *result.loewner;
        if (config.outputs.hull_csv && lo.hull) {
            HullResult h = *lo.hull;
            if (lo.scene.frame)
                for (auto& curve : h.curves) curve = map_polyline(lo.scene.frame->to_disk, curve);
            emit("hull.csv", hull_csv(h));
        }
        if (config.outputs.motion_report) emit("motion.json", motion_report(config, lo));
    }
    return files;
}

double polyline_distance(Complex z, std::span<const Complex> polyline) {
    if (polyline.empty()) return std::numeric_limits<double>::infinity();
    double best = std::abs(z - polyline.front());
    for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
        const Complex a = polyline[k], d = polyline[k + 1] - a;
        const double len2 = std::norm(d);
        double t = len2 > 0 ? (std::conj(d) * (z - a)).real() / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, std::abs(z - (a + t * d)));
    }
    return best;
}

double hull_trajectory_distance(const HullResult& hull, std::span<const Trajectory> trajectories) {
    double worst = 0.0;
    for (std::size_t j = 0; j < hull.curves.size(); ++j) {
        const auto it = std::find_if(trajectories.begin(), trajectories.end(),
                                     [&](const Trajectory& t) { return t.growth_index && *t.growth_index == j; });
        if (it == trajectories.end()) return std::numeric_limits<double>::infinity();
        for (Complex z : hull.curves[j]) worst = std::max(worst, polyline_distance(z, it->points));
    }
    return worst;
}

Suite parse_suite(const std::string& name) {
    if (name == "all") return Suite::all;
    if (name == "invariance") return Suite::invariance;
    if (name == "motion") return Suite::motion;
    if (name == "equivalence") return Suite::equivalence;
    throw Error(ErrorKind::configuration, "unknown suite '" + name + "' (all, invariance, motion, equivalence)");
}

bool VerifyReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string VerifyReport::to_text() const {
    std::ostringstream os;
    os.precision(3);
    for (const auto& c : checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.suite << "/" << c.name << " value=" << std::scientific << c.value
           << " threshold=" << c.threshold << " margin=" << (c.threshold - c.value);
        if (!c.note.empty()) os << " (" << c.note << ")";
        os << "\n";
    }
    os << (ok() ? "verify: all checks passed\n" : "verify: tolerance breach\n");
    return os.str();
}

VerifyReport verify(const SceneConfig& config, Suite suite) {
    check_config(config);
    VerifyReport report;
    const auto add = [&](std::string s, std::string name, double value, double threshold, std::string note = "") {
        report.checks.push_back({std::move(s), std::move(name), value, threshold, value < threshold, std::move(note)});
    };
    const HalfPlaneScene hp = to_half_plane(config.divisor);

    if (suite == Suite::all || suite == Suite::invariance) {
        Rng rng(config.seed);
        double worst = 0.0;
        for (int d = 0; d < 20; ++d) {
            const SymmetricDivisor div = random_divisor(rng, d % 2 ? Domain::disk : Domain::half_plane);
            for (int m = 0; m < 100; ++m)
                worst = std::max(worst, std::abs(std::expm1(moebius_invariance_log_residual(div, random_moebius(rng, div)))));
        }
        add("invariance", "moebius_random_divisors", worst, 1e-9, "20 divisors x 100 maps");

        if (all_finite(hp.divisor)) {
            double scene_worst = 0.0;
            for (int m = 0; m < 100; ++m)
                scene_worst = std::max(scene_worst, std::abs(std::expm1(moebius_invariance_log_residual(
                                                        hp.divisor, random_moebius(rng, hp.divisor)))));
            add("invariance", "moebius_scene", scene_worst, 1e-9, "100 maps, half-plane chart");
        }

        add("invariance", "dlog_fd_scene", dlog_relative_error(hp.divisor), 1e-6);
        double fd_worst = 0.0;
        for (int k = 0; k < 50; ++k) fd_worst = std::max(fd_worst, dlog_relative_error(random_divisor(rng, Domain::half_plane)));
        add("invariance", "dlog_fd_random", fd_worst, 1e-6, "50 configurations");
    }

    if (suite == Suite::all || suite == Suite::motion) {
        const LoewnerOutcome lo = run_loewner(config, false, true);
        for (std::size_t k = 0; k < lo.motion.size(); ++k) {
            const auto& m = lo.motion[k];
            std::ostringstream note;
            note << "z=" << format_point(SpherePoint::at(config.loewner.motion_points[k]));
            if (m.partial) note << ", swallowed at t=" << m.death_time << "; drift over the alive samples";
            if (lo.run.collision) note << ", driving collision in [" << lo.run.collision->t_lo << ", " << lo.run.collision->t_hi << "]";
            add("motion", "drift_" + std::to_string(k), m.max_relative_drift, 1e-6, note.str());
        }
    }

    if (suite == Suite::all || suite == Suite::equivalence) {
        const QuadDifferential qd = build_quadratic_differential(hp.divisor);
        const auto trajectories = launch_all(qd, config.trace);
        const LoewnerOutcome lo = run_loewner(config, true, false);
        std::string note = "hull to t=" + format_double(lo.run.states.back().t);
        if (lo.run.collision) note += " (driving collision)";
        add("equivalence", "hull_vs_trajectory", hull_trajectory_distance(*lo.hull, trajectories), 5e-3, note);
    }
    return report;
}

}  // namespace sle0
