#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "sle0/render.hpp"
#include "sle0/run.hpp"
#include "sle0/scene.hpp"

using namespace sle0;

namespace {

const Complex I(0, 1);

std::vector<Diagnostic> diagnostics_of(const std::string& yaml) {
    try {
        parse_config(yaml);
    } catch (const ConfigError& e) {
        return e.diagnostics();
    }
    return {};
}

bool mentions(const std::vector<Diagnostic>& ds, const std::string& needle, int line = -1) {
    for (const auto& d : ds)
        if (d.message.find(needle) != std::string::npos && (line < 0 || d.line == line)) return true;
    return false;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("literals") {
    CHECK(parse_point("1+2i").value() == Complex(1, 2));
    CHECK(parse_point("-i").value() == -I);
    CHECK(parse_point(" 3/2 - 0.5i ").value() == Complex(1.5, -0.5));
    CHECK(parse_point("inf").is_infinite());
    CHECK(std::abs(parse_point("cis(2/3)").value() - std::polar(1.0, 2 * std::numbers::pi / 3)) < 1e-15);
    CHECK(parse_point("1e-3i").value() == Complex(0, 1e-3));
    CHECK_THROWS(parse_point("1+"));
    CHECK_THROWS(parse_point("2x"));
    CHECK_THROWS(parse_point("cis(1/0)"));

    CHECK(parse_charge("-3/2") == Charge::half_integer(-3, 2));
    CHECK(parse_charge("-1.5") == Charge::half_integer(-3, 2));
    CHECK_FALSE(parse_charge("1/3").is_half_integer());

    for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_charge(Charge::half_integer(-3, 2)) == "-3/2");
    CHECK(parse_point(format_point(SpherePoint::at(Complex(0.1, -1.0 / 3.0)))) == SpherePoint::at(Complex(0.1, -1.0 / 3.0)));
}

TEST_CASE("preset expansion") {
    const auto c = parse_config("preset: fig3\n");
    CHECK(c.divisor == preset("fig3").divisor);
    REQUIRE(c.divisor.growth.size() == 3u);
    CHECK(std::abs(c.divisor.growth[1].value() - std::polar(1.0, std::numbers::pi / 3)) < 1e-15);
    CHECK(c.divisor.marked[2].charge == Charge::half_integer(-3, 2));

    const auto over = parse_config("preset: fig1\ntrace:\n  step: 0.002\n");
    CHECK(over.trace.step == 0.002);
    CHECK(over.divisor == preset("fig1").divisor);

    CHECK(preset_names() == std::vector<std::string>{"fig1", "fig2", "fig3"});
    CHECK_THROWS_AS(preset("fig4"), Error);
}

TEST_CASE("diagnostics carry line numbers") {
    SUBCASE("empty growth") {
        const auto ds = diagnostics_of("domain: half_plane\ngrowth: []\nmarked:\n  - {point: inf, charge: -2}\n");
        CHECK(mentions(ds, "no_growth_points", 2));
    }
    SUBCASE("malformed literal") {
        const auto ds = diagnostics_of("domain: half_plane\ngrowth: [\"0\"]\nmarked:\n  - {point: \"1+2j\", charge: -3}\n");
        CHECK(mentions(ds, "malformed complex literal '1+2j'", 4));
    }
    SUBCASE("unknown key") {
        const auto ds = diagnostics_of("preset: fig1\ntrace:\n  stepp: 0.1\n");
        CHECK(mentions(ds, "unknown key 'stepp'", 3));
    }
    SUBCASE("neutrality") {
        const auto ds = diagnostics_of("domain: half_plane\ngrowth: [\"0\"]\nmarked:\n  - {point: inf, charge: -2}\n");
        CHECK(mentions(ds, "non_neutral"));
    }
    SUBCASE("yaml syntax") {
        const auto ds = diagnostics_of("growth: [0\nmarked: x\n");
        REQUIRE_FALSE(ds.empty());
        CHECK(ds[0].line > 0);
    }
}

TEST_CASE("non-half-integer charges only for the Loewner outputs") {
    const std::string divisor =
        "domain: half_plane\n"
        "growth: [\"0\"]\n"
        "marked:\n"
        "  - {point: \"1\", charge: 1/3}\n"
        "  - {point: inf, charge: -10/3}\n";
    const auto ds = diagnostics_of(divisor);
    CHECK(mentions(ds, "unsupported charge", 4));

    const auto c = parse_config(divisor +
                                "outputs: {field_svg: false, trajectories_csv: false, analysis_report: false,"
                                " hull_csv: true, motion_report: true}\n");
    CHECK_FALSE(c.divisor.marked[0].charge.is_half_integer());
    CHECK_FALSE(c.outputs.needs_trajectories());
    CHECK(c.outputs.needs_loewner());
}

TEST_CASE("serialization round trip") {
    for (const auto& name : preset_names()) {
        const auto c = preset(name);
        CHECK(parse_config(serialize(c)) == c);
    }
    SceneConfig c;
    c.name = "custom";
    c.divisor = {Domain::half_plane,
                 {SpherePoint::at(-0.3), SpherePoint::at(1.0 / 7.0)},
                 {{SpherePoint::at(Complex(0.1, 0.9)), Charge::half_integer(-1, 2)},
                  {SpherePoint::at(Complex(0.1, -0.9)), Charge::half_integer(-1, 2)},
                  {SpherePoint::infinity(), Charge::half_integer(-3)}}};
    c.rates.add_segment(0.0, {1.0, 0.5});
    c.rates.add_segment(0.05, {0.0, 1.0});
    c.trace.step = 2.5e-4;
    c.loewner.motion_points = {Complex(0.3, 1.7), Complex(-2, 0.25)};
    c.outputs.hull_csv = true;
    c.seed = 1234567890123ULL;
    check_config(c);
    CHECK(parse_config(serialize(c)) == c);
}

TEST_CASE("artifact formats") {
    const auto c = preset("fig2");
    const auto result = run_scene(c);
    REQUIRE(result.qd);
    const std::string csv = trajectory_csv(result.trajectories[0]);
    CHECK(csv.rfind("index,arc_length,re,im\n", 0) == 0);
    REQUIRE(result.loewner);
    REQUIRE(result.loewner->hull);
    CHECK(hull_csv(*result.loewner->hull).rfind("t,curve,re,im\n", 0) == 0);

    const std::string svg = render_svg(*result.qd, c.divisor, result.trajectories);
    for (const char* cls : {"field", "boundary", "trajectory", "growth", "marked"})
        CHECK(svg.find(std::string("class=\"") + cls + "\"") != std::string::npos);
    CHECK(svg == render_svg(*result.qd, c.divisor, run_scene(c).trajectories));

    const std::string report = analysis_report(c, result);
    CHECK(report.find("\"converging_pairs\"") != std::string::npos);
}

TEST_CASE("fig1 field plot matches the golden file") {
    const auto c = preset("fig1");
    const auto result = run_scene(c);
    const std::string golden = read_file(std::filesystem::path(SLE0_GOLDEN_DIR) / "fig1.svg");
    REQUIRE_FALSE(golden.empty());
    CHECK(render_svg(*result.qd, c.divisor, result.trajectories) == golden);
}

TEST_CASE("writing artifacts") {
    const auto dir = std::filesystem::temp_directory_path() / "sle0_scene_test";
    std::filesystem::remove_all(dir);
    const auto c = preset("fig3");
    const auto files = write_artifacts(c, run_scene(c), dir);
    for (const auto& f : files) CHECK(std::filesystem::exists(dir / f));
    CHECK(parse_config(read_file(dir / "scene.yaml")) == c);
    std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes") {
    CHECK(exit_code_for(ConfigError({{1, "x"}})) == exit_validation);
    CHECK(exit_code_for(Error(ErrorKind::symmetry_violation, "x")) == exit_validation);
    CHECK(exit_code_for(Error(ErrorKind::inversion_failure, "x")) == exit_runtime);
    CHECK(exit_code_for(std::runtime_error("x")) == exit_runtime);
    CHECK(parse_suite("motion") == Suite::motion);
    CHECK_THROWS(parse_suite("bogus"));
}
