#include "sle0/divisor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace sle0 {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::degenerate_configuration: return "degenerate configuration";
        case ErrorKind::symmetry_violation: return "symmetry violation";
        case ErrorKind::unsupported_charge: return "unsupported charge";
        case ErrorKind::invalid_reference: return "invalid reference";
        case ErrorKind::proximity: return "too close to singularity";
        case ErrorKind::bad_launch: return "bad launch";
        case ErrorKind::launch_selection: return "launch selection";
        case ErrorKind::ill_defined_winding: return "ill-defined winding";
        case ErrorKind::collision: return "collision";
        case ErrorKind::configuration: return "configuration";
        case ErrorKind::inversion_failure: return "inversion failure";
        case ErrorKind::pole: return "pole";
        case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

const char* to_string(Domain domain) {
    switch (domain) {
        case Domain::half_plane: return "half_plane";
        case Domain::disk: return "disk";
        case Domain::sphere: return "sphere";
    }
    return "unknown";
}

const char* to_string(Violation violation) {
    switch (violation) {
        case Violation::no_growth_points: return "no_growth_points";
        case Violation::growth_off_boundary: return "growth_off_boundary";
        case Violation::not_distinct: return "not_distinct";
        case Violation::asymmetric: return "asymmetric";
        case Violation::non_neutral: return "non_neutral";
    }
    return "unknown";
}

Complex SpherePoint::value() const {
    if (infinite_) throw Error(ErrorKind::internal, "value() of the point at infinity");
    return z_;
}

// ---------------------------------------------------------------- Charge

Charge Charge::half_integer(int numerator, int denominator) {
    if (denominator == 0) throw Error(ErrorKind::configuration, "charge with zero denominator");
    if (denominator < 0) {
        numerator = -numerator;
        denominator = -denominator;
    }
    const int g = std::gcd(std::abs(numerator), denominator);
    if (g > 1) {
        numerator /= g;
        denominator /= g;
    }
    if (denominator != 1 && denominator != 2) {
        std::ostringstream os;
        os << numerator << "/" << denominator << " is not a half-integer";
        throw Error(ErrorKind::unsupported_charge, os.str());
    }
    Charge c;
    c.exact_ = true;
    c.numerator_ = numerator;
    c.denominator_ = denominator;
    return c;
}

Charge Charge::real(double sigma) {
    const double twice = 2.0 * sigma;
    const double rounded = std::round(twice);
    if (std::abs(twice - rounded) <= 1e-12) return half_integer(static_cast<int>(rounded), 2);
    Charge c;
    c.exact_ = false;
    c.numerator_ = 0;
    c.denominator_ = 1;
    c.real_ = sigma;
    return c;
}

double Charge::value() const noexcept {
    return exact_ ? static_cast<double>(numerator_) / denominator_ : real_;
}

int Charge::numerator() const {
    if (!exact_) throw Error(ErrorKind::unsupported_charge, "charge is not a half-integer");
    return numerator_;
}

int Charge::denominator() const {
    if (!exact_) throw Error(ErrorKind::unsupported_charge, "charge is not a half-integer");
    return denominator_;
}

int Charge::twice() const {
    if (!exact_) throw Error(ErrorKind::unsupported_charge, "charge is not a half-integer");
    return denominator_ == 2 ? numerator_ : 2 * numerator_;
}

// ---------------------------------------------------------------- divisor

double SymmetricDivisor::total_charge() const {
    double total = static_cast<double>(growth.size());
    for (const auto& m : marked) total += m.charge.value();
    return total;
}

bool SymmetricDivisor::all_half_integer() const {
    return std::all_of(marked.begin(), marked.end(),
                       [](const MarkedPoint& m) { return m.charge.is_half_integer(); });
}

bool ValidationReport::has(Violation kind) const noexcept {
    return std::any_of(issues.begin(), issues.end(),
                       [kind](const ValidationIssue& i) { return i.kind == kind; });
}

namespace {

std::string describe(const SpherePoint& p) {
    if (p.is_infinite()) return "inf";
    std::ostringstream os;
    os << p.value().real() << (p.value().imag() < 0 ? "" : "+") << p.value().imag() << "i";
    return os.str();
}

bool same_point(const SpherePoint& a, const SpherePoint& b, double tol) {
    if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
    return std::abs(a.value() - b.value()) <= tol * std::max(1.0, std::abs(a.value()));
}

SpherePoint reflect(const SpherePoint& p, Domain domain) {
    if (domain == Domain::half_plane) {
        return p.is_infinite() ? p : SpherePoint::at(std::conj(p.value()));
    }
    // circle inversion z -> 1/conj(z), 0 <-> infinity
    if (p.is_infinite()) return SpherePoint::at(0.0);
    if (std::abs(p.value()) == 0.0) return SpherePoint::infinity();
    return SpherePoint::at(1.0 / std::conj(p.value()));
}

bool on_boundary(const SpherePoint& p, Domain domain) {
    switch (domain) {
        case Domain::half_plane:
            return p.is_infinite() || std::abs(p.value().imag()) <= kSymmetryTolerance;
        case Domain::disk:
            return p.is_finite() && std::abs(std::abs(p.value()) - 1.0) <= kSymmetryTolerance;
        case Domain::sphere:
            return true;
    }
    return false;
}

struct ChargedPoint {
    Complex z;
    double sigma;
};

std::vector<ChargedPoint> finite_charged_points(const SymmetricDivisor& d) {
    std::vector<ChargedPoint> pts;
    for (const auto& g : d.growth)
        if (g.is_finite()) pts.push_back({g.value(), 1.0});
    for (const auto& m : d.marked)
        if (m.point.is_finite()) pts.push_back({m.point.value(), m.charge.value()});
    return pts;
}

double log_distance(Complex a, Complex b) {
    const double r = std::abs(a - b);
    if (r <= kDistinctTolerance) throw Error(ErrorKind::degenerate_configuration, "coincident points");
    return std::log(r);
}

}  // namespace

ValidationReport validate(const SymmetricDivisor& divisor) {
    ValidationReport report;
    auto add = [&report](Violation v, std::string msg) { report.issues.push_back({v, std::move(msg)}); };

    if (divisor.growth.empty()) add(Violation::no_growth_points, "at least one growth point is required");

    for (std::size_t j = 0; j < divisor.growth.size(); ++j) {
        if (!on_boundary(divisor.growth[j], divisor.domain))
            add(Violation::growth_off_boundary,
                "growth point " + std::to_string(j) + " (" + describe(divisor.growth[j]) +
                    ") is not on the boundary of the " + to_string(divisor.domain));
    }

    std::vector<SpherePoint> all(divisor.growth);
    for (const auto& m : divisor.marked) all.push_back(m.point);
    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b)
            if (same_point(all[a], all[b], kDistinctTolerance))
                add(Violation::not_distinct, "points " + std::to_string(a) + " and " + std::to_string(b) +
                                                 " coincide at " + describe(all[a]));

    if (divisor.domain != Domain::sphere) {
        for (std::size_t i = 0; i < divisor.marked.size(); ++i) {
            const auto& m = divisor.marked[i];
            const SpherePoint mirror = reflect(m.point, divisor.domain);
            const bool paired = std::any_of(divisor.marked.begin(), divisor.marked.end(), [&](const MarkedPoint& o) {
                return same_point(o.point, mirror, kSymmetryTolerance) &&
                       std::abs(o.charge.value() - m.charge.value()) <= 1e-12;
            });
            if (!paired)
                add(Violation::asymmetric, "marked point " + std::to_string(i) + " (" + describe(m.point) +
                                               ") has no mirror partner " + describe(mirror) + " with equal charge");
        }
    }

    const double total = divisor.total_charge();
    if (std::abs(total + 2.0) > kSymmetryTolerance) {
        std::ostringstream os;
        os << "total charge is " << total << ", neutrality requires -2";
        add(Violation::non_neutral, os.str());
    }
    return report;
}

double conformal_dimension(double sigma) { return sigma * sigma + 2.0 * sigma; }
double conformal_dimension(const Charge& sigma) { return conformal_dimension(sigma.value()); }

double log_coulomb_correlation_abs(const SymmetricDivisor& divisor) {
    const auto pts = finite_charged_points(divisor);
    double acc = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j)
        for (std::size_t k = j + 1; k < pts.size(); ++k)
            acc += 2.0 * pts[j].sigma * pts[k].sigma * log_distance(pts[j].z, pts[k].z);
    return acc;
}

double coulomb_correlation_abs(const SymmetricDivisor& divisor) {
    return std::exp(log_coulomb_correlation_abs(divisor));
}

double log_partition_abs(std::span<const Complex> x, std::span<const MarkedPoint> marked) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) acc += 2.0 * log_distance(x[i], x[j]);
    for (std::size_t i = 0; i < marked.size(); ++i) {
        if (marked[i].point.is_infinite()) continue;
        const Complex qi = marked[i].point.value();
        const double si = marked[i].charge.value();
        for (std::size_t j = i + 1; j < marked.size(); ++j) {
            if (marked[j].point.is_infinite()) continue;
            acc += 2.0 * si * marked[j].charge.value() * log_distance(qi, marked[j].point.value());
        }
        for (const Complex xk : x) acc += 2.0 * si * log_distance(xk, qi);
    }
    return acc;
}

double partition_abs(std::span<const Complex> x, std::span<const MarkedPoint> marked) {
    return std::exp(log_partition_abs(x, marked));
}

double dlog_partition(std::span<const double> x, std::span<const MarkedPoint> marked, std::size_t j) {
    if (j >= x.size()) throw Error(ErrorKind::configuration, "growth index out of range");
    Complex acc = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (k == j) continue;
        const double d = x[j] - x[k];
        if (std::abs(d) <= kDistinctTolerance) throw Error(ErrorKind::degenerate_configuration, "coincident growth points");
        acc += 2.0 / d;
        scale += std::abs(2.0 / d);
    }
    for (const auto& m : marked) {
        if (m.point.is_infinite()) continue;
        const Complex d = x[j] - m.point.value();
        if (std::abs(d) <= kDistinctTolerance)
            throw Error(ErrorKind::degenerate_configuration, "growth point coincides with a marked point");
        const Complex term = 2.0 * m.charge.value() / d;
        acc += term;
        scale += std::abs(term);
    }
    if (std::abs(acc.imag()) > 1e-10 * std::max(1.0, scale)) {
        std::ostringstream os;
        os << "dlog Z has imaginary part " << acc.imag() << "; marked points are not conjugation-closed";
        throw Error(ErrorKind::symmetry_violation, os.str());
    }
    return acc.real();
}

// ---------------------------------------------------------------- Möbius

MoebiusMap::MoebiusMap(Complex a, Complex b, Complex c, Complex d) {
    m_ << a, b, c, d;
    if (std::abs(m_.determinant()) <= 1e-12)
        throw Error(ErrorKind::degenerate_configuration, "Möbius map with vanishing determinant");
}

MoebiusMap::MoebiusMap(const Eigen::Matrix2cd& coefficients) : m_(coefficients) {
    if (std::abs(m_.determinant()) <= 1e-12)
        throw Error(ErrorKind::degenerate_configuration, "Möbius map with vanishing determinant");
}

MoebiusMap MoebiusMap::identity() { return MoebiusMap(1.0, 0.0, 0.0, 1.0); }

MoebiusMap MoebiusMap::cayley() { return MoebiusMap(1.0, Complex(0, -1), 1.0, Complex(0, 1)); }

MoebiusMap MoebiusMap::rotation(double angle) { return MoebiusMap(std::polar(1.0, angle), 0.0, 0.0, 1.0); }

SpherePoint MoebiusMap::operator()(const SpherePoint& p) const {
    const Complex a = m_(0, 0), b = m_(0, 1), c = m_(1, 0), d = m_(1, 1);
    if (p.is_infinite()) {
        if (std::abs(c) <= 1e-15 * std::abs(a)) return SpherePoint::infinity();
        return SpherePoint::at(a / c);
    }
    const Complex z = p.value();
    const Complex den = c * z + d;
    if (std::abs(den) <= 1e-14 * (std::abs(c * z) + std::abs(d))) return SpherePoint::infinity();
    return SpherePoint::at((a * z + b) / den);
}

Complex MoebiusMap::operator()(Complex z) const {
    const SpherePoint w = (*this)(SpherePoint::at(z));
    if (w.is_infinite()) throw Error(ErrorKind::pole, "point is mapped to infinity");
    return w.value();
}

Complex MoebiusMap::derivative(Complex z) const {
    const Complex den = m_(1, 0) * z + m_(1, 1);
    return m_.determinant() / (den * den);
}

MoebiusMap MoebiusMap::inverse() const {
    Eigen::Matrix2cd adj;
    adj << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
    return MoebiusMap(adj);
}

MoebiusMap MoebiusMap::compose(const MoebiusMap& inner) const { return MoebiusMap(Eigen::Matrix2cd(m_ * inner.m_)); }

namespace {

Domain classify_image(const MoebiusMap& map, Domain source) {
    if (source == Domain::sphere) return Domain::sphere;
    const std::vector<Complex> boundary = source == Domain::half_plane
                                              ? std::vector<Complex>{0.0, 1.0, -1.0}
                                              : std::vector<Complex>{1.0, Complex(0, 1), -1.0};
    const SpherePoint interior = map(SpherePoint::at(source == Domain::half_plane ? Complex(0, 1) : Complex(0, 0)));

    std::vector<SpherePoint> images;
    for (Complex b : boundary) images.push_back(map(SpherePoint::at(b)));

    const bool on_line = std::all_of(images.begin(), images.end(), [](const SpherePoint& w) {
        return w.is_infinite() || std::abs(w.value().imag()) <= 1e-10 * std::max(1.0, std::abs(w.value()));
    });
    if (on_line && interior.is_finite() && interior.value().imag() > 0) return Domain::half_plane;

    const bool on_circle = std::all_of(images.begin(), images.end(), [](const SpherePoint& w) {
        return w.is_finite() && std::abs(std::abs(w.value()) - 1.0) <= 1e-10;
    });
    if (on_circle && interior.is_finite() && std::abs(interior.value()) < 1.0) return Domain::disk;
    return Domain::sphere;
}

}  // namespace

SymmetricDivisor moebius_pushforward(const SymmetricDivisor& divisor, const MoebiusMap& map) {
    SymmetricDivisor out;
    out.domain = classify_image(map, divisor.domain);
    out.growth.reserve(divisor.growth.size());
    for (const auto& g : divisor.growth) out.growth.push_back(map(g));
    out.marked.reserve(divisor.marked.size());
    for (const auto& m : divisor.marked) out.marked.push_back({map(m.point), m.charge});

    const ValidationReport after = validate(out);
    if (after.has(Violation::not_distinct))
        throw Error(ErrorKind::degenerate_configuration, "points collide after the Möbius map");
    if (!after.ok() && validate(divisor).ok())
        throw Error(ErrorKind::internal, "Möbius image of a valid divisor failed validation: " + after.issues[0].message);
    return out;
}

}  // namespace sle0
