#include "sle0/random.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace sle0 {

namespace {

bool far_from(Complex z, const std::vector<Complex>& taken, double separation) {
    for (Complex w : taken)
        if (std::abs(z - w) < separation) return false;
    return true;
}

}  // namespace

SymmetricDivisor random_divisor(Rng& rng, Domain domain, double separation) {
    if (domain == Domain::sphere) throw Error(ErrorKind::configuration, "random divisors live on the half-plane or disk");
    std::uniform_int_distribution<int> n_growth(1, 3), n_pairs(0, 2), n_boundary(1, 2), twice_sigma(-4, 2);
    std::uniform_real_distribution<double> line(-3.0, 3.0), height(0.2, 2.5), angle(0.0, 2 * std::numbers::pi),
        radius(0.15, 0.85);

    std::vector<Complex> taken;
    const auto boundary_point = [&]() {
        for (;;) {
            const Complex z = domain == Domain::half_plane ? Complex(line(rng), 0.0) : std::polar(1.0, angle(rng));
            if (far_from(z, taken, separation)) {
                taken.push_back(z);
                return z;
            }
        }
    };
    const auto interior_point = [&]() {
        for (;;) {
            const Complex z = domain == Domain::half_plane ? Complex(line(rng), height(rng))
                                                           : std::polar(radius(rng), angle(rng));
            const Complex mirror = domain == Domain::half_plane ? std::conj(z) : 1.0 / std::conj(z);
            if (far_from(z, taken, separation) && far_from(mirror, taken, separation)) {
                taken.push_back(z);
                taken.push_back(mirror);
                return std::make_pair(z, mirror);
            }
        }
    };

    SymmetricDivisor d;
    d.domain = domain;
    const int n = n_growth(rng);
    for (int j = 0; j < n; ++j) d.growth.push_back(SpherePoint::at(boundary_point()));

    int twice_total = 2 * n;
    const int pairs = n_pairs(rng);
    for (int p = 0; p < pairs; ++p) {
        const auto [z, mirror] = interior_point();
        const int s = twice_sigma(rng);
        const Charge c = Charge::half_integer(s, 2);
        d.marked.push_back({SpherePoint::at(z), c});
        d.marked.push_back({SpherePoint::at(mirror), c});
        twice_total += 2 * s;
    }
    const int boundary = n_boundary(rng);
    for (int b = 0; b + 1 < boundary; ++b) {
        const int s = twice_sigma(rng);
        d.marked.push_back({SpherePoint::at(boundary_point()), Charge::half_integer(s, 2)});
        twice_total += s;
    }
    // The last boundary charge closes neutrality; zero charges are skipped so
    // every marked point is a genuine singularity.
    const int closing = -4 - twice_total;
    if (closing != 0) d.marked.push_back({SpherePoint::at(boundary_point()), Charge::half_integer(closing, 2)});
    return d;
}

MoebiusMap random_moebius(Rng& rng, const SymmetricDivisor& divisor) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        const MoebiusMap m({gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)},
                           {gauss(rng), gauss(rng)});
        if (std::abs(m.determinant()) < 0.1) continue;
        bool ok = true;
        const auto check = [&](const SpherePoint& p) {
            const Complex z = p.value();
            const Complex den = m.coefficients()(1, 0) * z + m.coefficients()(1, 1);
            ok = ok && std::abs(den) > 0.05;
        };
        for (const auto& g : divisor.growth) check(g);
        for (const auto& q : divisor.marked) check(q.point);
        if (ok) return m;
    }
}

double moebius_invariance_log_residual(const SymmetricDivisor& divisor, const MoebiusMap& map) {
    const SymmetricDivisor image = moebius_pushforward(divisor, map);
    double lhs = log_coulomb_correlation_abs(image);
    for (const auto& g : divisor.growth) lhs += conformal_dimension(1.0) * std::log(std::abs(map.derivative(g.value())));
    for (const auto& q : divisor.marked)
        lhs += conformal_dimension(q.charge) * std::log(std::abs(map.derivative(q.point.value())));
    return lhs - log_coulomb_correlation_abs(divisor);
}

}  // namespace sle0
