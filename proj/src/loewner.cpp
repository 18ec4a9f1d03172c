#include "sle0/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "sle0/ode.hpp"

namespace sle0 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Packed ODE state: [x (n) | q (m) | g (a) | log g' (a)].
struct Layout {
    std::size_t n, m, a;
    Eigen::Index x(std::size_t j) const { return static_cast<Eigen::Index>(j); }
    Eigen::Index q(std::size_t l) const { return static_cast<Eigen::Index>(n + l); }
    Eigen::Index g(std::size_t k) const { return static_cast<Eigen::Index>(n + m + k); }
    Eigen::Index dg(std::size_t k) const { return static_cast<Eigen::Index>(n + m + a + k); }
    Eigen::Index size() const { return static_cast<Eigen::Index>(n + m + 2 * a); }
};

Layout layout_of(const LoewnerProblem& p, const LoewnerState& s) { return {p.x0.size(), p.marked.size(), s.tracked.size()}; }

Eigen::VectorXcd pack(const Layout& L, const LoewnerState& s) {
    Eigen::VectorXcd y(L.size());
    for (std::size_t j = 0; j < L.n; ++j) y[L.x(j)] = s.x[j];
    for (std::size_t l = 0; l < L.m; ++l) y[L.q(l)] = s.q[l];
    for (std::size_t k = 0; k < L.a; ++k) {
        y[L.g(k)] = s.tracked[k].g;
        y[L.dg(k)] = s.tracked[k].log_dg;
    }
    return y;
}

double dlog_at(const LoewnerProblem& p, std::span<const double> x, std::span<const Complex> q, std::size_t j) {
    std::vector<MarkedPoint> marked(p.marked);
    for (std::size_t l = 0; l < marked.size(); ++l) marked[l].point = SpherePoint::at(q[l]);
    return dlog_partition(x, marked, j);
}

std::vector<double> velocity(const LoewnerProblem& p, std::span<const double> x, std::span<const Complex> q,
                             const std::vector<double>& nu) {
    std::vector<double> v(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        double s = nu[j] * dlog_at(p, x, q, j);
        for (std::size_t k = 0; k < x.size(); ++k)
            if (k != j) s += 2.0 * nu[k] / (x[j] - x[k]);
        v[j] = s;
    }
    return v;
}

Complex flow_rate(Complex w, std::span<const double> x, const std::vector<double>& nu) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += 2.0 * nu[j] / (w - x[j]);
    return s;
}

Eigen::VectorXcd rhs(const LoewnerProblem& p, const Layout& L, const std::vector<bool>& alive,
                     const std::vector<double>& nu, const Eigen::VectorXcd& y) {
    std::vector<double> x(L.n);
    std::vector<Complex> q(L.m);
    for (std::size_t j = 0; j < L.n; ++j) x[j] = y[L.x(j)].real();
    for (std::size_t l = 0; l < L.m; ++l) q[l] = y[L.q(l)];

    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(L.size());
    const auto v = velocity(p, x, q, nu);
    for (std::size_t j = 0; j < L.n; ++j) d[L.x(j)] = v[j];
    for (std::size_t l = 0; l < L.m; ++l) d[L.q(l)] = flow_rate(q[l], x, nu);
    for (std::size_t k = 0; k < L.a; ++k) {
        if (!alive[k]) continue;
        const Complex g = y[L.g(k)];
        Complex s = 0.0, s2 = 0.0;
        for (std::size_t j = 0; j < L.n; ++j) {
            const Complex r = 1.0 / (g - x[j]);
            s += 2.0 * nu[j] * r;
            s2 += 2.0 * nu[j] * r * r;
        }
        d[L.g(k)] = s;
        d[L.dg(k)] = -s2;
    }
    return d;
}

double min_driving_gap(const std::vector<double>& x) {
    double gap = kInf;
    for (std::size_t j = 0; j < x.size(); ++j)
        for (std::size_t k = j + 1; k < x.size(); ++k) gap = std::min(gap, std::abs(x[j] - x[k]));
    return gap;
}

}  // namespace

void Parametrization::add_segment(double start, std::vector<double> rates) {
    if (!(start >= 0)) throw Error(ErrorKind::configuration, "rate segments must start at t >= 0");
    if (!segments_.empty() && !(start > segments_.back().start))
        throw Error(ErrorKind::configuration, "rate segment starts must be strictly increasing");
    for (double r : rates)
        if (!(r >= 0) || !std::isfinite(r)) throw Error(ErrorKind::configuration, "capacity rates must be finite and >= 0");
    segments_.push_back({start, std::move(rates)});
}

std::vector<double> Parametrization::rates(double t, std::size_t n) const {
    const Segment* active = nullptr;
    for (const auto& s : segments_)
        if (s.start <= t) active = &s;
    if (!active) return std::vector<double>(n, 1.0);
    if (active->rates.size() != n) throw Error(ErrorKind::configuration, "rate segment has the wrong number of curves");
    return active->rates;
}

double Parametrization::next_breakpoint(double t) const {
    for (const auto& s : segments_)
        if (s.start > t) return s.start;
    return kInf;
}

void Parametrization::check(std::size_t n) const {
    for (const auto& s : segments_)
        if (s.rates.size() != n)
            throw Error(ErrorKind::configuration, "rate segment at t=" + std::to_string(s.start) + " has " +
                                                      std::to_string(s.rates.size()) + " rates for " +
                                                      std::to_string(n) + " curves");
}

LoewnerProblem LoewnerProblem::from_divisor(const SymmetricDivisor& divisor, Parametrization nu) {
    if (divisor.domain != Domain::half_plane)
        throw Error(ErrorKind::configuration, "the Loewner chain needs a half-plane divisor");
    const auto report = validate(divisor);
    if (!report.ok()) throw Error(ErrorKind::configuration, "invalid divisor: " + report.issues.front().message);
    LoewnerProblem p;
    for (const auto& g : divisor.growth) {
        if (g.is_infinite()) throw Error(ErrorKind::configuration, "a growth point at infinity cannot drive the chain");
        p.x0.push_back(g.value().real());
    }
    for (std::size_t l = 0; l < divisor.marked.size(); ++l) {
        if (divisor.marked[l].point.is_infinite()) continue;
        p.marked.push_back(divisor.marked[l]);
        p.marked_index.push_back(l);
    }
    nu.check(p.x0.size());
    p.nu = std::move(nu);
    return p;
}

void LoewnerOptions::check() const {
    if (!(dt > 0)) throw Error(ErrorKind::configuration, "dt must be positive");
    if (!(collision_tolerance > 0) || !(min_dt > 0) || !(approach_fraction > 0 && approach_fraction < 1) ||
        !(tracked_fraction > 0 && tracked_fraction < 1))
        throw Error(ErrorKind::configuration, "Loewner tolerances must be positive");
}

LoewnerState initial_state(const LoewnerProblem& problem) {
    LoewnerState s;
    s.x = problem.x0;
    for (const auto& m : problem.marked) s.q.push_back(m.point.value());
    for (Complex z : problem.tracked) s.tracked.push_back({z, z, 0.0, true, std::numeric_limits<double>::quiet_NaN()});
    return s;
}

std::vector<double> driving_velocity(const LoewnerProblem& problem, const LoewnerState& state) {
    return velocity(problem, state.x, state.q, problem.nu.rates(state.t, state.x.size()));
}

LoewnerState step(const LoewnerProblem& problem, const LoewnerState& state, double dt, double collision_tolerance) {
    const Layout L = layout_of(problem, state);
    const auto nu = problem.nu.rates(state.t, L.n);
    std::vector<bool> alive(L.a);
    for (std::size_t k = 0; k < L.a; ++k) alive[k] = state.tracked[k].alive;

    const auto f = [&](double, const Eigen::VectorXcd& y) { return rhs(problem, L, alive, nu, y); };
    const Eigen::VectorXcd y = ode::rk4_step(f, state.t, pack(L, state), dt);

    LoewnerState out;
    out.t = state.t + dt;
    out.x.resize(L.n);
    out.q.resize(L.m);
    for (std::size_t j = 0; j < L.n; ++j) out.x[j] = y[L.x(j)].real();
    for (std::size_t l = 0; l < L.m; ++l) out.q[l] = y[L.q(l)];

    const auto collide = [&](const std::string& what) { throw CollisionError(state.t, out.t, what); };
    for (std::size_t j = 0; j < L.n; ++j) {
        if (!std::isfinite(out.x[j])) collide("driving point " + std::to_string(j) + " diverged");
        for (std::size_t k = j + 1; k < L.n; ++k) {
            const bool flipped = (out.x[j] - out.x[k]) * (state.x[j] - state.x[k]) <= 0;
            if (flipped || std::abs(out.x[j] - out.x[k]) < collision_tolerance)
                collide("driving points " + std::to_string(j) + " and " + std::to_string(k) + " collided");
        }
        for (std::size_t l = 0; l < L.m; ++l) {
            const Complex before = state.q[l] - state.x[j], after = out.q[l] - out.x[j];
            const bool on_line = before.imag() == 0.0;
            const bool flipped = on_line && before.real() * after.real() <= 0;
            if (flipped || std::abs(after) < collision_tolerance)
                collide("driving point " + std::to_string(j) + " met marked point " +
                        std::to_string(problem.marked_index[l]));
        }
    }

    out.tracked = state.tracked;
    for (std::size_t k = 0; k < L.a; ++k) {
        auto& tp = out.tracked[k];
        if (!tp.alive) continue;
        const Complex g = y[L.g(k)], dg = y[L.dg(k)];
        bool dead = !std::isfinite(g.real()) || !std::isfinite(g.imag()) || !std::isfinite(dg.real());
        for (double xj : out.x) dead = dead || std::abs(g - xj) < collision_tolerance;
        if (dead) {
            tp.alive = false;
            tp.death_time = out.t;
        } else {
            tp.g = g;
            tp.log_dg = dg;
        }
    }
    return out;
}

LoewnerRun evolve(const LoewnerProblem& problem, double T, const LoewnerOptions& options) {
    options.check();
    if (!(T > 0)) throw Error(ErrorKind::configuration, "T must be positive");
    const double tol = options.collision_tolerance;

    LoewnerRun run;
    run.problem = problem;
    LoewnerState state = initial_state(problem);
    const std::size_t n = state.x.size();
    if (min_driving_gap(state.x) < tol) throw Error(ErrorKind::configuration, "driving points coincide at t = 0");
    for (double x : state.x)
        for (Complex q : state.q)
            if (std::abs(q - x) < tol) throw Error(ErrorKind::configuration, "a marked point sits on a driving point at t = 0");

    std::vector<double> checkpoints = options.checkpoints;
    checkpoints.push_back(T);
    std::sort(checkpoints.begin(), checkpoints.end());

    run.states.push_back(state);
    while (state.t < T) {
        const double t = state.t;
        double target = T;
        for (double c : checkpoints)
            if (c > t) {
                target = std::min(target, c);
                break;
            }
        target = std::min(target, problem.nu.next_breakpoint(t));
        double h = std::min(options.dt, target - t);

        const auto nu = problem.nu.rates(t, n);
        const auto v = driving_velocity(problem, state);
        double nu_sum = 0.0;
        for (double r : nu) nu_sum += r;

        // Step limits from every approaching pair that involves a driving point.
        double min_gap = kInf, worst_gap = kInf, worst_rate = 0.0;
        std::string worst_pair, closest_pair;
        const auto limit = [&](double gap, double rate, auto describe) {
            if (gap < min_gap) {
                min_gap = gap;
                closest_pair = describe();
            }
            if (rate <= 0) return;
            h = std::min(h, options.approach_fraction * gap / rate);
            if (worst_rate == 0.0 || gap / rate < worst_gap / worst_rate) {
                worst_gap = gap;
                worst_rate = rate;
                worst_pair = describe();
            }
        };
        if (nu_sum > 0 && n > 1) {
            const double gap = min_driving_gap(state.x);
            h = std::min(h, gap * gap / (8.0 * nu_sum));
        }
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                limit(std::abs(state.x[j] - state.x[k]), std::abs(v[j] - v[k]), [&] {
                    return "driving points " + std::to_string(j) + " and " + std::to_string(k);
                });
        for (std::size_t l = 0; l < state.q.size(); ++l) {
            const Complex qd = flow_rate(state.q[l], state.x, nu);
            for (std::size_t j = 0; j < n; ++j)
                limit(std::abs(state.q[l] - state.x[j]), std::abs(qd - v[j]), [&] {
                    return "driving point " + std::to_string(j) + " and marked point " +
                           std::to_string(problem.marked_index[l]);
                });
        }

        if (h < options.min_dt || min_gap < tol) {
            const double t_hi = worst_rate > 0 ? t + worst_gap / worst_rate : t;
            const std::string who = min_gap < tol ? closest_pair : worst_pair;
            run.collision = CollisionInfo{t, std::max(t_hi, t), who + " met at t in [" + std::to_string(t) + ", " +
                                                                    std::to_string(t_hi) + "]"};
            break;
        }

        // Observer points near the hull get their own limit; those that would
        // need a step below the floor are declared swallowed.
        for (auto& tp : state.tracked) {
            if (!tp.alive) continue;
            const Complex gd = flow_rate(tp.g, state.x, nu);
            double required = kInf;
            bool close = false;
            for (std::size_t j = 0; j < n; ++j) {
                const double gap = std::abs(tp.g - state.x[j]);
                close = close || gap < tol;
                const double rate = std::abs(gd - v[j]);
                if (rate > 0) required = std::min(required, options.tracked_fraction * gap / rate);
            }
            if (close || required < options.min_dt) {
                tp.alive = false;
                tp.death_time = t;
            } else {
                h = std::min(h, required);
            }
        }

        try {
            state = step(problem, state, h, tol);
        } catch (const CollisionError& e) {
            run.collision = CollisionInfo{e.t_lo(), e.t_hi(), e.what()};
            break;
        }
        if (std::abs(state.t - target) <= 1e-12 * std::max(1.0, std::abs(target))) state.t = target;
        run.states.push_back(state);
    }
    return run;
}

DrivingPath::DrivingPath(const LoewnerRun& run) {
    for (const auto& s : run.states) {
        times_.push_back(s.t);
        x_.push_back(s.x);
        v_.push_back(driving_velocity(run.problem, s));
    }
}

std::vector<double> DrivingPath::at(double t) const {
    if (times_.size() == 1 || t <= times_.front()) return x_.front();
    if (t >= times_.back()) return x_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double h = times_[k + 1] - times_[k];
    const double s = (t - times_[k]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s), h01 = s * s * (3 - 2 * s),
                 h11 = s * s * (s - 1);
    std::vector<double> out(x_[k].size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = h00 * x_[k][j] + h10 * h * v_[k][j] + h01 * x_[k + 1][j] + h11 * h * v_[k + 1][j];
    return out;
}

HullResult trace_hull(const LoewnerRun& run, const HullOptions& options) {
    if (!(options.lift > 0)) throw Error(ErrorKind::configuration, "hull lift must be positive");
    HullResult out;
    const std::size_t n = run.problem.x0.size();
    out.curves.assign(n, {});
    if (run.states.empty()) return out;

    const DrivingPath path(run);
    const auto& nu = run.problem.nu;

    std::vector<std::size_t> picks;
    const std::size_t count = run.states.size();
    const std::size_t samples = std::max<std::size_t>(2, std::min(options.max_samples, count));
    for (std::size_t i = 0; i < samples; ++i) {
        const std::size_t k = (i * (count - 1) + (samples - 1) / 2) / (samples - 1);
        if (picks.empty() || picks.back() != k) picks.push_back(k);
    }

    ode::AdaptiveOptions ao;
    ao.initial_step = 0.1 * options.lift * options.lift;

    for (std::size_t k : picks) {
        const LoewnerState& s = run.states[k];
        out.times.push_back(s.t);
        for (std::size_t j = 0; j < n; ++j) {
            Complex w(s.x[j], options.lift);
            const auto f = [&](double tau, const Complex& h) {
                return flow_rate(h, path.at(tau), nu.rates(tau, n));
            };
            const auto guard = [&](double, const Complex& h) {
                if (!std::isfinite(h.real()) || !std::isfinite(h.imag()) || h.imag() < -1e-12)
                    throw Error(ErrorKind::inversion_failure,
                                "reverse flow left the half-plane for curve " + std::to_string(j) + " at t=" +
                                    std::to_string(s.t));
            };
            // Integrate backwards, segment by segment so each piece has constant rates.
            double upper = s.t;
            while (upper > 0) {
                double lower = 0.0;
                for (const auto& seg : nu.segments())
                    if (seg.start < upper) lower = std::max(lower, seg.start);
                w = ode::integrate_adaptive(f, upper, lower, w, ao, guard);
                upper = lower;
            }
            out.curves[j].push_back(w);
        }
    }
    return out;
}

MotionIntegralReport motion_integral(const LoewnerRun& run, std::size_t tracked) {
    if (run.states.empty() || tracked >= run.states.front().tracked.size())
        throw Error(ErrorKind::configuration, "no such tracked point");
    MotionIntegralReport rep;
    const auto& marked = run.problem.marked;

    Complex log0 = 0.0, prev = 0.0;
    bool first = true;
    for (const auto& s : run.states) {
        const TrackedPoint& tp = s.tracked[tracked];
        if (!tp.alive) {
            rep.partial = true;
            rep.death_time = tp.death_time;
            break;
        }
        Complex logn = 2.0 * tp.log_dg;
        for (double x : s.x) logn += 2.0 * std::log(tp.g - x);
        for (std::size_t l = 0; l < marked.size(); ++l) logn += 2.0 * marked[l].charge.value() * std::log(tp.g - s.q[l]);
        if (first) {
            log0 = logn;
        } else {
            // Keep the argument continuous across branch jumps of the sum.
            const double jump = logn.imag() - prev.imag();
            logn -= Complex(0, 2 * std::numbers::pi * std::round(jump / (2 * std::numbers::pi)));
        }
        prev = logn;
        first = false;

        const Complex rel = logn - log0;
        rep.times.push_back(s.t);
        rep.values.push_back(std::exp(logn));
        rep.max_relative_drift = std::max(rep.max_relative_drift, std::abs(std::exp(rel) - 1.0));
        rep.modulus_drift = std::max(rep.modulus_drift, std::abs(std::exp(rel.real()) - 1.0));
        rep.argument_drift = std::max(rep.argument_drift, std::abs(rel.imag()));
    }
    if (!rep.partial && !run.states.back().tracked[tracked].alive) {
        rep.partial = true;
        rep.death_time = run.states.back().tracked[tracked].death_time;
    }
    return rep;
}

EvolvedPoints evolved_points(const LoewnerProblem& problem, const LoewnerState& state) {
    EvolvedPoints e;
    for (double x : state.x) e.growth.emplace_back(x, 0.0);
    for (std::size_t l = 0; l < state.q.size(); ++l) e.marked.emplace_back(problem.marked_index[l], state.q[l]);
    return e;
}

}  // namespace sle0
