#include "sle0/quad_diff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sle0 {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_two_pi(double a) {
    a = std::fmod(a, 2 * kPi);
    if (a < 0) a += 2 * kPi;
    if (a >= 2 * kPi) a -= 2 * kPi;
    return a;
}

// Representative of a line direction with argument in (-pi/2, pi/2].
Complex canonical_half_turn(Complex c) {
    double a = std::arg(c);
    if (a <= -kPi / 2) a += kPi;
    if (a > kPi / 2) a -= kPi;
    return std::polar(1.0, a);
}

bool on_boundary(const QuadDifferential& qd, Complex p) {
    if (qd.domain == Domain::half_plane) return std::abs(p.imag()) <= kSymmetryTolerance;
    if (qd.domain == Domain::disk) return std::abs(std::abs(p) - 1.0) <= kSymmetryTolerance;
    return false;
}

Complex boundary_tangent(const QuadDifferential& qd, Complex z) {
    if (qd.domain == Domain::disk) return Complex(0, 1) * z / std::abs(z);
    return 1.0;
}

Complex log_power_product(const QuadDifferential& qd, Complex z) {
    Complex acc = 0.0;
    for (const auto& f : qd.factors) acc += static_cast<double>(f.order) * std::log(z - f.point);
    return acc;
}

}  // namespace

int QuadDifferential::finite_order_sum() const {
    int s = 0;
    for (const auto& f : factors) s += f.order;
    return s;
}

QuadDifferential build_quadratic_differential(const SymmetricDivisor& divisor) {
    QuadDifferential qd;
    qd.domain = divisor.domain;
    for (std::size_t j = 0; j < divisor.growth.size(); ++j) {
        if (divisor.growth[j].is_infinite()) {
            qd.infinity_source = {FactorRole::growth, j};
            continue;
        }
        qd.factors.push_back({divisor.growth[j].value(), 2, FactorRole::growth, j});
    }
    for (std::size_t l = 0; l < divisor.marked.size(); ++l) {
        const auto& m = divisor.marked[l];
        if (!m.charge.is_half_integer())
            throw Error(ErrorKind::unsupported_charge,
                        "marked point " + std::to_string(l) + " has a charge that is not a half-integer");
        if (m.point.is_infinite()) {
            qd.infinity_source = {FactorRole::marked, l};
            continue;
        }
        qd.factors.push_back({m.point.value(), m.charge.twice(), FactorRole::marked, l});
    }
    qd.order_at_infinity = -4 - qd.finite_order_sum();
    if (qd.infinity_source) {
        const auto [role, idx] = *qd.infinity_source;
        const int expected = role == FactorRole::growth ? 2 : divisor.marked[idx].charge.twice();
        if (expected != qd.order_at_infinity)
            throw Error(ErrorKind::configuration, "order at infinity disagrees with the charge there; divisor is not neutral");
    }
    qd.phase = 1.0;
    if (qd.domain != Domain::sphere) qd.phase = normalize_phase(qd, 0);
    return qd;
}

namespace {

struct BoundaryNodes {
    std::vector<double> coords;  // real positions (line) or angles (circle), sorted
    bool infinity = false;       // line only: infinity is a boundary singularity
};

BoundaryNodes boundary_nodes(const QuadDifferential& qd) {
    BoundaryNodes nodes;
    for (const auto& f : qd.factors) {
        if (f.order == 0 || !on_boundary(qd, f.point)) continue;
        nodes.coords.push_back(qd.domain == Domain::disk ? wrap_two_pi(std::arg(f.point)) : f.point.real());
    }
    std::sort(nodes.coords.begin(), nodes.coords.end());
    nodes.infinity = qd.domain == Domain::half_plane && qd.order_at_infinity != 0;
    return nodes;
}

}  // namespace

std::size_t boundary_arc_count(const QuadDifferential& qd) {
    const auto nodes = boundary_nodes(qd);
    return std::max<std::size_t>(1, nodes.coords.size() + (nodes.infinity ? 1 : 0));
}

Complex boundary_reference_point(const QuadDifferential& qd, std::size_t arc) {
    if (qd.domain == Domain::sphere) throw Error(ErrorKind::invalid_reference, "a sphere divisor has no boundary");
    const auto nodes = boundary_nodes(qd);
    const auto& b = nodes.coords;
    const std::size_t n = b.size();

    if (qd.domain == Domain::disk) {
        if (n == 0) return 1.0;
        const std::size_t k = arc % n;
        if (n == 1) return std::polar(1.0, b[0] + kPi);
        const double hi = k + 1 < n ? b[k + 1] : b[0] + 2 * kPi;
        return std::polar(1.0, 0.5 * (b[k] + hi));
    }

    const std::size_t total = n + (nodes.infinity ? 1 : 0);
    if (n == 0) return 0.0;
    const std::size_t k = arc % total;
    if (k + 1 < n) return 0.5 * (b[k] + b[k + 1]);
    if (k + 1 == n) return b[n - 1] + 1.0;  // towards +infinity
    return b[0] - 1.0;                       // from -infinity back to the first node
}

Complex normalize_phase_at(const QuadDifferential& qd, Complex z) {
    if (nearest_singularity_distance(qd, z) < kFieldProximity)
        throw Error(ErrorKind::invalid_reference, "reference point coincides with a singularity");
    const Complex tau = boundary_tangent(qd, z);
    const double angle = log_power_product(qd, z).imag() + 2.0 * std::arg(tau);
    return canonical_half_turn(std::polar(1.0, -0.5 * angle));
}

Complex normalize_phase(const QuadDifferential& qd, std::size_t reference_arc) {
    return normalize_phase_at(qd, boundary_reference_point(qd, reference_arc));
}

Complex log_root_product(const QuadDifferential& qd, Complex z) { return 0.5 * log_power_product(qd, z); }

Complex root_product(const QuadDifferential& qd, Complex z) { return std::exp(log_root_product(qd, z)); }

Complex evaluate(const QuadDifferential& qd, Complex z) {
    return qd.phase * qd.phase * std::exp(log_power_product(qd, z));
}

double nearest_singularity_distance(const QuadDifferential& qd, Complex z) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : qd.factors)
        if (f.order != 0) best = std::min(best, std::abs(z - f.point));
    return best;
}

Complex direction_field(const QuadDifferential& qd, Complex z, std::optional<Complex> prev_dir) {
    if (nearest_singularity_distance(qd, z) < kFieldProximity)
        throw Error(ErrorKind::proximity, "direction field evaluated within 1e-9 of a singularity");
    // u = conj(sqrt Q)/|sqrt Q|, so Q u^2 = |sqrt Q|^2 > 0.
    const double angle = std::arg(qd.phase) + log_root_product(qd, z).imag();
    Complex u = std::polar(1.0, -angle);
    if (prev_dir) {
        if ((u * std::conj(*prev_dir)).real() < 0) u = -u;
    } else {
        const double a = std::arg(u);
        if (a < 0 || a >= kPi) u = -u;
    }
    return u;
}

SingularityInfo classify_singularity(const QuadDifferential& qd, std::size_t i) {
    const Factor& f = qd.factors.at(i);
    SingularityInfo info{f.point, f.order, {}};
    // Leading coefficient of phase^2 Q at the point.
    Complex log_a = 2.0 * std::log(qd.phase);
    for (std::size_t j = 0; j < qd.factors.size(); ++j)
        if (j != i) log_a += static_cast<double>(qd.factors[j].order) * std::log(f.point - qd.factors[j].point);
    const double arg_a = log_a.imag();
    const int m = f.order + 2;
    const int count = std::abs(m);
    for (int k = 0; k < count; ++k) info.separatrix_angles.push_back(wrap_two_pi((2 * kPi * k - arg_a) / m));
    std::sort(info.separatrix_angles.begin(), info.separatrix_angles.end());
    return info;
}

std::vector<SingularityInfo> classify_singularities(const QuadDifferential& qd) {
    std::vector<SingularityInfo> out;
    for (std::size_t i = 0; i < qd.factors.size(); ++i)
        if (qd.factors[i].order != 0) out.push_back(classify_singularity(qd, i));
    return out;
}

QuadDifferential pullback(const QuadDifferential& qd, const EvolvedPoints& evolved) {
    QuadDifferential out = qd;
    for (auto& f : out.factors) {
        if (f.role == FactorRole::growth) {
            f.point = evolved.growth.at(f.index);
            continue;
        }
        const auto it = std::find_if(evolved.marked.begin(), evolved.marked.end(),
                                     [&](const auto& e) { return e.first == f.index; });
        if (it == evolved.marked.end()) throw Error(ErrorKind::configuration, "missing evolved marked point");
        f.point = it->second;
    }
    for (std::size_t a = 0; a < out.factors.size(); ++a)
        for (std::size_t b = a + 1; b < out.factors.size(); ++b)
            if (std::abs(out.factors[a].point - out.factors[b].point) <= kDistinctTolerance)
                throw Error(ErrorKind::degenerate_configuration, "evolved points collided");
    if (out.domain != Domain::sphere) out.phase = normalize_phase(out, 0);
    return out;
}

}  // namespace sle0
