#include "sle0/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

namespace sle0 {

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& ds) {
    std::string s;
    for (const auto& d : ds) {
        if (!s.empty()) s += "; ";
        if (d.line > 0) s += "line " + std::to_string(d.line) + ": ";
        s += d.message;
    }
    return s;
}

std::string strip(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

double parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty())
        throw std::invalid_argument("malformed number '" + std::string(s) + "'");
    return v;
}

// "a" or "a/b" with decimal a and b.
double parse_rational(std::string_view s) {
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_number(s);
    const double den = parse_number(s.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("zero denominator in '" + std::string(s) + "'");
    return parse_number(s.substr(0, slash)) / den;
}

bool is_number_char(char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '/' || c == 'e' || c == 'E'; }

Complex parse_complex_terms(const std::string& s) {
    Complex z = 0.0;
    std::size_t i = 0;
    bool first = true;
    while (i < s.size()) {
        double sign = 1.0;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1.0 : 1.0;
            ++i;
        } else if (!first) {
            throw std::invalid_argument("expected '+' or '-' between terms");
        }
        const std::size_t start = i;
        while (i < s.size() && (is_number_char(s[i]) ||
                                ((s[i] == '+' || s[i] == '-') && i > start && (s[i - 1] == 'e' || s[i - 1] == 'E'))))
            ++i;
        const std::string number = s.substr(start, i - start);
        const bool imaginary = i < s.size() && s[i] == 'i';
        if (imaginary) ++i;
        if (number.empty() && !imaginary) throw std::invalid_argument("empty term");
        const double v = sign * (number.empty() ? 1.0 : parse_rational(number));
        z += imaginary ? Complex(0.0, v) : Complex(v, 0.0);
        first = false;
    }
    if (first) throw std::invalid_argument("empty complex literal");
    return z;
}

// ------------------------------------------------------------ YAML reading

struct Reader {
    std::vector<Diagnostic> diags;

    static int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

    void error(const YAML::Node& n, std::string msg) { diags.push_back({line_of(n), std::move(msg)}); }

    void check_keys(const YAML::Node& map, std::initializer_list<const char*> known, const std::string& where) {
        for (const auto& kv : map) {
            const std::string key = kv.first.as<std::string>();
            if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
                error(kv.first, "unknown key '" + key + "' in " + where);
        }
    }

    bool is_map(const YAML::Node& n, const std::string& what) {
        if (n.IsMap()) return true;
        error(n, what + " must be a mapping");
        return false;
    }

    bool is_seq(const YAML::Node& n, const std::string& what) {
        if (n.IsSequence()) return true;
        error(n, what + " must be a list");
        return false;
    }

    std::optional<double> number(const YAML::Node& n, const std::string& what) {
        if (!n.IsScalar()) {
            error(n, what + " must be a number");
            return std::nullopt;
        }
        try {
            return parse_rational(strip(n.Scalar()));
        } catch (const std::exception& e) {
            error(n, what + ": " + e.what());
            return std::nullopt;
        }
    }

    std::optional<bool> boolean(const YAML::Node& n, const std::string& what) {
        const std::string s = n.IsScalar() ? n.Scalar() : "";
        if (s == "true" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "no" || s == "off") return false;
        error(n, what + " must be true or false");
        return std::nullopt;
    }

    std::optional<SpherePoint> point(const YAML::Node& n, const std::string& what) {
        if (!n.IsScalar()) {
            error(n, what + " must be a complex literal");
            return std::nullopt;
        }
        try {
            return parse_point(n.Scalar());
        } catch (const std::exception& e) {
            error(n, "malformed complex literal '" + n.Scalar() + "' for " + what + ": " + e.what());
            return std::nullopt;
        }
    }

    std::optional<Charge> charge(const YAML::Node& n, const std::string& what) {
        if (!n.IsScalar()) {
            error(n, what + " must be a rational literal");
            return std::nullopt;
        }
        try {
            return parse_charge(n.Scalar());
        } catch (const std::exception& e) {
            error(n, "malformed charge '" + n.Scalar() + "' for " + what + ": " + e.what());
            return std::nullopt;
        }
    }
};

struct Lines {
    int growth = 0, marked = 0, trace = 0, loewner = 0, rates = 0, outputs = 0;
    std::vector<int> marked_items;
};

std::vector<Diagnostic> semantic_checks(const SceneConfig& c, const Lines& lines) {
    std::vector<Diagnostic> out;
    const int divisor_line = lines.marked ? lines.marked : lines.growth;
    if (c.divisor.domain == Domain::sphere)
        out.push_back({0, "domain must be half_plane or disk"});
    for (const auto& issue : validate(c.divisor.domain == Domain::sphere ? SymmetricDivisor{} : c.divisor).issues) {
        const int line = issue.kind == Violation::no_growth_points || issue.kind == Violation::growth_off_boundary
                             ? lines.growth
                             : divisor_line;
        out.push_back({line, std::string("invalid divisor (") + to_string(issue.kind) + "): " + issue.message});
    }
    if (c.outputs.needs_trajectories()) {
        for (std::size_t l = 0; l < c.divisor.marked.size(); ++l) {
            if (c.divisor.marked[l].charge.is_half_integer()) continue;
            const int line = l < lines.marked_items.size() ? lines.marked_items[l] : lines.marked;
            out.push_back({line, std::string(to_string(ErrorKind::unsupported_charge)) + ": marked point " +
                                     std::to_string(l) + " has charge " + format_charge(c.divisor.marked[l].charge) +
                                     "; trajectory outputs need 2*sigma to be an integer (request only hull_csv / "
                                     "motion_report for other charges)"});
        }
    }
    try {
        c.trace.check();
    } catch (const Error& e) {
        out.push_back({lines.trace, e.what()});
    }
    const auto& L = c.loewner;
    if (!(L.T > 0) || !(L.dt > 0) || !(L.lift > 0) || L.hull_samples < 2)
        out.push_back({lines.loewner, "loewner T, dt, lift must be positive and hull_samples at least 2"});
    for (Complex z : L.motion_points)
        if (!(z.imag() > 0)) out.push_back({lines.loewner, "motion points must lie in the upper half-plane"});
    try {
        c.rates.check(c.divisor.growth.size());
    } catch (const Error& e) {
        out.push_back({lines.rates, e.what()});
    }
    return out;
}

// ------------------------------------------------------------ presets

SceneConfig make_preset(const std::string& name) {
    const Complex I(0, 1);
    const auto at = [](Complex z) { return SpherePoint::at(z); };
    const auto cis = [](double turns_of_pi) { return SpherePoint::at(std::polar(1.0, std::numbers::pi * turns_of_pi)); };
    SceneConfig c;
    c.name = name;
    c.preset = name;
    c.divisor.domain = Domain::disk;
    c.trace.singularity_capture_radius = 1e-5;
    c.outputs = {true, true, true, true, true};
    if (name == "fig1") {
        c.divisor.growth = {at(-I), at(1.0), at(I)};
        c.divisor.marked = {{cis(2.0 / 3.0), Charge::half_integer(-1)}, {at(-1.0), Charge::half_integer(-4)}};
    } else if (name == "fig2") {
        c.divisor.growth = {cis(0.25), at(-I), at(1.0)};
        c.divisor.marked = {{at(0.0), Charge::half_integer(-1)},
                            {SpherePoint::infinity(), Charge::half_integer(-1)},
                            {at(-1.0), Charge::half_integer(-3)}};
    } else if (name == "fig3") {
        c.divisor.growth = {at(-I), cis(1.0 / 3.0), at(I)};
        c.divisor.marked = {{at(-1.0 / 3.0), Charge::half_integer(-1)},
                            {at(-3.0), Charge::half_integer(-1)},
                            {at(0.5), Charge::half_integer(-3, 2)},
                            {at(2.0), Charge::half_integer(-3, 2)}};
    } else {
        throw Error(ErrorKind::configuration, "unknown preset '" + name + "' (known: fig1, fig2, fig3)");
    }
    return c;
}

}  // namespace

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : Error(ErrorKind::configuration, join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

SpherePoint parse_point(const std::string& text) {
    std::string s = strip(text);
    if (s == "inf" || s == "infinity" || s == "oo") return SpherePoint::infinity();
    if (s.rfind("cis(", 0) == 0 || s.rfind("-cis(", 0) == 0) {
        const bool neg = s[0] == '-';
        const std::size_t open = s.find('(');
        if (s.back() != ')') throw std::invalid_argument("unterminated cis(...)");
        const double r = parse_rational(std::string_view(s).substr(open + 1, s.size() - open - 2));
        const Complex z = std::polar(1.0, std::numbers::pi * r);
        return SpherePoint::at(neg ? -z : z);
    }
    return SpherePoint::at(parse_complex_terms(s));
}

Charge parse_charge(const std::string& text) {
    const std::string s = strip(text);
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const double num = parse_number(s.substr(0, slash));
        const double den = parse_number(s.substr(slash + 1));
        if (den == 0.0) throw std::invalid_argument("zero denominator");
        if ((den == 1.0 || den == 2.0) && num == std::round(num) && std::abs(num) < 1e6)
            return Charge::half_integer(static_cast<int>(num), static_cast<int>(den));
        return Charge::real(num / den);
    }
    return Charge::real(parse_number(s));
}

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error(ErrorKind::internal, "number formatting failed");
    return std::string(buf, end);
}

std::string format_point(const SpherePoint& p) {
    if (p.is_infinite()) return "inf";
    const Complex z = p.value();
    if (z.imag() == 0.0) return format_double(z.real());
    const std::string im = z.imag() == 1.0 ? "i" : z.imag() == -1.0 ? "-i" : format_double(z.imag()) + "i";
    if (z.real() == 0.0) return im;
    return format_double(z.real()) + (im.front() == '-' ? "" : "+") + im;
}

std::string format_charge(const Charge& c) {
    if (!c.is_half_integer()) return format_double(c.value());
    if (c.denominator() == 1) return std::to_string(c.numerator());
    return std::to_string(c.numerator()) + "/" + std::to_string(c.denominator());
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3"}; }

SceneConfig preset(const std::string& name) { return make_preset(name); }

void check_config(const SceneConfig& config) {
    auto diags = semantic_checks(config, Lines{});
    if (!diags.empty()) throw ConfigError(std::move(diags));
}

SceneConfig parse_config(const std::string& text) {
    Reader r;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError({{e.mark.line >= 0 ? e.mark.line + 1 : 0, "YAML syntax error: " + e.msg}});
    }
    if (!root.IsMap()) throw ConfigError({{1, "config must be a mapping of keys"}});

    r.check_keys(root, {"name", "preset", "domain", "growth", "marked", "rates", "trace", "loewner", "outputs", "seed"},
                 "scene");

    SceneConfig c;
    Lines lines;
    if (const auto n = root["preset"]) {
        try {
            c = make_preset(n.as<std::string>());
        } catch (const Error& e) {
            r.error(n, e.what());
        }
    }
    if (const auto n = root["name"]) c.name = n.as<std::string>();
    if (const auto n = root["domain"]) {
        const std::string d = n.as<std::string>();
        if (d == "half_plane" || d == "half-plane") c.divisor.domain = Domain::half_plane;
        else if (d == "disk") c.divisor.domain = Domain::disk;
        else r.error(n, "domain must be half_plane or disk, got '" + d + "'");
    }
    if (const auto n = root["growth"]) {
        lines.growth = Reader::line_of(n);
        c.divisor.growth.clear();
        if (r.is_seq(n, "growth"))
            for (const auto& item : n)
                if (auto p = r.point(item, "growth point")) c.divisor.growth.push_back(*p);
    }
    if (const auto n = root["marked"]) {
        lines.marked = Reader::line_of(n);
        c.divisor.marked.clear();
        if (r.is_seq(n, "marked")) {
            for (const auto& item : n) {
                if (!r.is_map(item, "marked point")) continue;
                r.check_keys(item, {"point", "charge"}, "marked point");
                if (!item["point"] || !item["charge"]) {
                    r.error(item, "marked point needs both 'point' and 'charge'");
                    continue;
                }
                auto p = r.point(item["point"], "marked point");
                auto q = r.charge(item["charge"], "charge");
                if (p && q) {
                    c.divisor.marked.push_back({*p, *q});
                    lines.marked_items.push_back(Reader::line_of(item));
                }
            }
        }
    }
    if (const auto n = root["rates"]) {
        lines.rates = Reader::line_of(n);
        c.rates = Parametrization{};
        if (r.is_seq(n, "rates")) {
            for (const auto& item : n) {
                if (!r.is_map(item, "rate segment")) continue;
                r.check_keys(item, {"start", "nu"}, "rate segment");
                const auto start = item["start"] ? r.number(item["start"], "start") : std::optional<double>(0.0);
                std::vector<double> nu;
                if (item["nu"] && r.is_seq(item["nu"], "nu"))
                    for (const auto& v : item["nu"])
                        if (auto x = r.number(v, "rate")) nu.push_back(*x);
                if (!start) continue;
                try {
                    c.rates.add_segment(*start, nu);
                } catch (const Error& e) {
                    r.error(item, e.what());
                }
            }
        }
    }
    if (const auto n = root["trace"]) {
        lines.trace = Reader::line_of(n);
        if (r.is_map(n, "trace")) {
            r.check_keys(n,
                         {"step", "max_arc_length", "capture_radius", "domain_margin", "adaptive", "max_turn_per_step",
                          "spiral_threshold", "angle_gap_threshold"},
                         "trace");
            const auto set = [&](const char* key, double& field) {
                if (n[key])
                    if (auto v = r.number(n[key], key)) field = *v;
            };
            set("step", c.trace.step);
            set("max_arc_length", c.trace.max_arc_length);
            set("capture_radius", c.trace.singularity_capture_radius);
            set("domain_margin", c.trace.domain_margin);
            set("max_turn_per_step", c.trace.max_turn_per_step);
            set("spiral_threshold", c.trace.spiral_threshold);
            set("angle_gap_threshold", c.trace.angle_gap_threshold);
            if (n["adaptive"])
                if (auto b = r.boolean(n["adaptive"], "adaptive")) c.trace.adaptive = *b;
        }
    }
    if (const auto n = root["loewner"]) {
        lines.loewner = Reader::line_of(n);
        if (r.is_map(n, "loewner")) {
            r.check_keys(n, {"T", "dt", "lift", "hull_samples", "motion_points"}, "loewner");
            if (n["T"])
                if (auto v = r.number(n["T"], "T")) c.loewner.T = *v;
            if (n["dt"])
                if (auto v = r.number(n["dt"], "dt")) c.loewner.dt = *v;
            if (n["lift"])
                if (auto v = r.number(n["lift"], "lift")) c.loewner.lift = *v;
            if (n["hull_samples"])
                if (auto v = r.number(n["hull_samples"], "hull_samples")) {
                    if (*v < 0 || *v != std::round(*v)) r.error(n["hull_samples"], "hull_samples must be a count");
                    else c.loewner.hull_samples = static_cast<std::size_t>(*v);
                }
            if (const auto m = n["motion_points"]) {
                c.loewner.motion_points.clear();
                if (r.is_seq(m, "motion_points"))
                    for (const auto& item : m)
                        if (auto p = r.point(item, "motion point")) {
                            if (p->is_infinite()) r.error(item, "motion points must be finite");
                            else c.loewner.motion_points.push_back(p->value());
                        }
            }
        }
    }
    if (const auto n = root["outputs"]) {
        lines.outputs = Reader::line_of(n);
        if (r.is_map(n, "outputs")) {
            r.check_keys(n, {"field_svg", "trajectories_csv", "hull_csv", "motion_report", "analysis_report"}, "outputs");
            const auto set = [&](const char* key, bool& field) {
                if (n[key])
                    if (auto b = r.boolean(n[key], key)) field = *b;
            };
            set("field_svg", c.outputs.field_svg);
            set("trajectories_csv", c.outputs.trajectories_csv);
            set("hull_csv", c.outputs.hull_csv);
            set("motion_report", c.outputs.motion_report);
            set("analysis_report", c.outputs.analysis_report);
        }
    }
    if (const auto n = root["seed"]) {
        if (auto v = r.number(n, "seed"); v && *v >= 0 && *v == std::round(*v)) c.seed = static_cast<std::uint64_t>(*v);
        else r.error(n, "seed must be a nonnegative integer");
    }

    if (r.diags.empty()) {
        auto more = semantic_checks(c, lines);
        r.diags.insert(r.diags.end(), more.begin(), more.end());
    }
    if (!r.diags.empty()) throw ConfigError(std::move(r.diags));
    return c;
}

SceneConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{0, "cannot read config file '" + path + "'"}});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const SceneConfig& c) {
    std::ostringstream os;
    const auto quoted = [](const std::string& s) { return "\"" + s + "\""; };
    const auto boolean = [](bool b) { return b ? "true" : "false"; };
    os << "name: " << quoted(c.name) << "\n";
    if (c.preset) os << "preset: " << *c.preset << "\n";
    os << "domain: " << to_string(c.divisor.domain) << "\n";
    os << "growth: [";
    for (std::size_t j = 0; j < c.divisor.growth.size(); ++j)
        os << (j ? ", " : "") << quoted(format_point(c.divisor.growth[j]));
    os << "]\n";
    os << "marked:";
    if (c.divisor.marked.empty()) os << " []";
    os << "\n";
    for (const auto& m : c.divisor.marked)
        os << "  - {point: " << quoted(format_point(m.point)) << ", charge: " << quoted(format_charge(m.charge)) << "}\n";
    if (!c.rates.segments().empty()) {
        os << "rates:\n";
        for (const auto& s : c.rates.segments()) {
            os << "  - {start: " << format_double(s.start) << ", nu: [";
            for (std::size_t j = 0; j < s.rates.size(); ++j) os << (j ? ", " : "") << format_double(s.rates[j]);
            os << "]}\n";
        }
    }
    const auto& t = c.trace;
    os << "trace:\n"
       << "  step: " << format_double(t.step) << "\n"
       << "  max_arc_length: " << format_double(t.max_arc_length) << "\n"
       << "  capture_radius: " << format_double(t.singularity_capture_radius) << "\n"
       << "  domain_margin: " << format_double(t.domain_margin) << "\n"
       << "  adaptive: " << boolean(t.adaptive) << "\n"
       << "  max_turn_per_step: " << format_double(t.max_turn_per_step) << "\n"
       << "  spiral_threshold: " << format_double(t.spiral_threshold) << "\n"
       << "  angle_gap_threshold: " << format_double(t.angle_gap_threshold) << "\n";
    const auto& L = c.loewner;
    os << "loewner:\n"
       << "  T: " << format_double(L.T) << "\n"
       << "  dt: " << format_double(L.dt) << "\n"
       << "  lift: " << format_double(L.lift) << "\n"
       << "  hull_samples: " << L.hull_samples << "\n"
       << "  motion_points: [";
    for (std::size_t k = 0; k < L.motion_points.size(); ++k)
        os << (k ? ", " : "") << quoted(format_point(SpherePoint::at(L.motion_points[k])));
    os << "]\n";
    const auto& o = c.outputs;
    os << "outputs:\n"
       << "  field_svg: " << boolean(o.field_svg) << "\n"
       << "  trajectories_csv: " << boolean(o.trajectories_csv) << "\n"
       << "  hull_csv: " << boolean(o.hull_csv) << "\n"
       << "  motion_report: " << boolean(o.motion_report) << "\n"
       << "  analysis_report: " << boolean(o.analysis_report) << "\n";
    os << "seed: " << c.seed << "\n";
    return os.str();
}

}  // namespace sle0
