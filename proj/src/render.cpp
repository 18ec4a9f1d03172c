#include "sle0/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sle0/scene.hpp"

namespace sle0 {

namespace {

struct Box {
    double xmin, xmax, ymin, ymax;
};

Box bounding_box(const QuadDifferential& qd, const SymmetricDivisor& divisor) {
    if (qd.domain == Domain::disk) return {-1.15, 1.15, -1.15, 1.15};
    double lo = -1.0, hi = 1.0;
    const auto take = [&](const SpherePoint& p) {
        if (p.is_infinite()) return;
        lo = std::min(lo, p.value().real());
        hi = std::max(hi, p.value().real());
    };
    for (const auto& g : divisor.growth) take(g);
    for (const auto& m : divisor.marked) take(m.point);
    lo -= 1.0;
    hi += 1.0;
    const double h = 0.6 * (hi - lo);
    return {lo, hi, -0.05 * h, h};
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    // Avoid "-0.0000" so output does not depend on the sign of tiny values.
    if (std::string(buf) == "-0.0000") return "0.0000";
    return buf;
}

bool inside(const QuadDifferential& qd, Complex z) {
    if (qd.domain == Domain::disk) return std::abs(z) < 1.0;
    if (qd.domain == Domain::half_plane) return z.imag() > 0.0;
    return true;
}

}  // namespace

std::string render_svg(const QuadDifferential& qd, const SymmetricDivisor& divisor,
                       std::span<const Trajectory> trajectories, const SvgOptions& options) {
    const Box b = bounding_box(qd, divisor);
    const double scale = options.width / (b.xmax - b.xmin);
    const double height = (b.ymax - b.ymin) * scale;
    const auto px = [&](Complex z) { return std::make_pair((z.real() - b.xmin) * scale, (b.ymax - z.imag()) * scale); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed4(options.width) << "\" height=\""
       << fixed4(height) << "\" viewBox=\"0 0 " << fixed4(options.width) << " " << fixed4(height) << "\">\n";
    os << "<style>.field{stroke:#9aa;stroke-width:1}.boundary{stroke:#000;fill:none;stroke-width:1.5}"
          ".trajectory{stroke:#000;fill:none;stroke-width:1.5}.growth{fill:#d22}.marked{fill:#2a2}</style>\n";

    if (qd.domain == Domain::disk) {
        const auto [cx, cy] = px(0.0);
        os << "<circle class=\"boundary\" cx=\"" << fixed4(cx) << "\" cy=\"" << fixed4(cy) << "\" r=\""
           << fixed4(scale) << "\"/>\n";
    } else {
        const auto [x0, y0] = px(Complex(b.xmin, 0));
        const auto [x1, y1] = px(Complex(b.xmax, 0));
        os << "<line class=\"boundary\" x1=\"" << fixed4(x0) << "\" y1=\"" << fixed4(y0) << "\" x2=\"" << fixed4(x1)
           << "\" y2=\"" << fixed4(y1) << "\"/>\n";
    }

    const int n = std::max(2, options.grid);
    const double dx = (b.xmax - b.xmin) / (n - 1), dy = (b.ymax - b.ymin) / (n - 1);
    const double half = 0.2 * std::min(dx, dy);
    os << "<g class=\"field\">\n";
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const Complex z(b.xmin + c * dx, b.ymin + r * dy);
            if (!inside(qd, z) || nearest_singularity_distance(qd, z) < 1e-6) continue;
            const Complex u = direction_field(qd, z);
            const auto [x0, y0] = px(z - half * u);
            const auto [x1, y1] = px(z + half * u);
            os << "<line class=\"field\" x1=\"" << fixed4(x0) << "\" y1=\"" << fixed4(y0) << "\" x2=\"" << fixed4(x1)
               << "\" y2=\"" << fixed4(y1) << "\"/>\n";
        }
    }
    os << "</g>\n";

    for (std::size_t k = 0; k < trajectories.size(); ++k) {
        const auto& pts = trajectories[k].points;
        os << "<polyline class=\"trajectory\" data-id=\"" << k << "\" points=\"";
        std::pair<double, double> last{-1e300, -1e300};
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto p = px(pts[i]);
            const bool end = i + 1 == pts.size();
            if (!end && std::hypot(p.first - last.first, p.second - last.second) < 0.5) continue;
            os << (i ? " " : "") << fixed4(p.first) << "," << fixed4(p.second);
            last = p;
        }
        os << "\"/>\n";
    }

    const auto dot = [&](const SpherePoint& p, const char* cls) {
        if (p.is_infinite()) return;
        const Complex z = p.value();
        if (z.real() < b.xmin || z.real() > b.xmax || z.imag() < b.ymin || z.imag() > b.ymax) return;
        const auto [x, y] = px(z);
        os << "<circle class=\"" << cls << "\" cx=\"" << fixed4(x) << "\" cy=\"" << fixed4(y) << "\" r=\"4.0000\"/>\n";
    };
    for (const auto& g : divisor.growth) dot(g, "growth");
    for (const auto& m : divisor.marked) dot(m.point, "marked");
    os << "</svg>\n";
    return os.str();
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::string s = "index,arc_length,re,im\n";
    for (std::size_t i = 0; i < trajectory.points.size(); ++i) {
        s += std::to_string(i) + "," + format_double(trajectory.arc_lengths[i]) + "," +
             format_double(trajectory.points[i].real()) + "," + format_double(trajectory.points[i].imag()) + "\n";
    }
    return s;
}

std::string hull_csv(const HullResult& hull) {
    std::string s = "t,curve,re,im\n";
    for (std::size_t k = 0; k < hull.times.size(); ++k)
        for (std::size_t j = 0; j < hull.curves.size(); ++j)
            s += format_double(hull.times[k]) + "," + std::to_string(j) + "," + format_double(hull.curves[j][k].real()) +
                 "," + format_double(hull.curves[j][k].imag()) + "\n";
    return s;
}

}  // namespace sle0
