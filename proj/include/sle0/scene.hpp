#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sle0/divisor.hpp"
#include "sle0/loewner.hpp"
#include "sle0/trajectory.hpp"

namespace sle0 {

struct LoewnerSettings {
    double T = 0.1;
    double dt = 1e-4;
    double lift = 1e-6;
    std::size_t hull_samples = 200;
    /// Observer points for the integral of motion, in half-plane coordinates
    /// (disk scenes are transported first).
    std::vector<Complex> motion_points{Complex(0, 2)};

    bool operator==(const LoewnerSettings&) const = default;
};

struct OutputRequest {
    bool field_svg = true;
    bool trajectories_csv = true;
    bool hull_csv = false;
    bool motion_report = false;
    bool analysis_report = true;

    /// Anything that needs the quadratic differential (half-integer charges).
    bool needs_trajectories() const { return field_svg || trajectories_csv || analysis_report; }
    bool needs_loewner() const { return hull_csv || motion_report; }
    bool operator==(const OutputRequest&) const = default;
};

struct SceneConfig {
    std::string name = "scene";
    std::optional<std::string> preset;
    SymmetricDivisor divisor;
    Parametrization rates;
    TraceParams trace;
    LoewnerSettings loewner;
    OutputRequest outputs;
    std::uint64_t seed = 0;

    bool operator==(const SceneConfig&) const = default;
};

struct Diagnostic {
    int line = 0;  // 1-based; 0 when no position applies
    std::string message;
};

/// Parse or validation failure; carries every diagnostic found.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// YAML scene description; see README for the schema. A `preset` key starts
/// from that preset and the remaining keys override it.
SceneConfig parse_config(const std::string& text);
SceneConfig load_config(const std::string& path);
/// Checks a SceneConfig built in code; throws ConfigError.
void check_config(const SceneConfig& config);

/// Exact round trip through parse_config.
std::string serialize(const SceneConfig& config);

/// "a+bi", "-i", "3/2", "cis(p/q)" (= e^{i pi p/q}), "inf".
SpherePoint parse_point(const std::string& text);
/// "p/q" or a decimal.
Charge parse_charge(const std::string& text);
std::string format_point(const SpherePoint& p);
std::string format_charge(const Charge& c);
/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

std::vector<std::string> preset_names();
SceneConfig preset(const std::string& name);

}  // namespace sle0
