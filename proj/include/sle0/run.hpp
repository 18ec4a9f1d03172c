#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sle0/conformal.hpp"
#include "sle0/loewner.hpp"
#include "sle0/quad_diff.hpp"
#include "sle0/scene.hpp"
#include "sle0/trajectory.hpp"

namespace sle0 {

/// Process exit statuses shared by the CLI and verify.
enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_tolerance = 2, exit_runtime = 3 };

/// Maps a thrown exception to an exit status.
int exit_code_for(const std::exception& e);

/// The scene's divisor in half-plane coordinates, and the frame used to get
/// there when the scene is on the disk.
struct HalfPlaneScene {
    SymmetricDivisor divisor;
    std::optional<HalfPlaneFrame> frame;
};

HalfPlaneScene to_half_plane(const SymmetricDivisor& divisor);

struct LoewnerOutcome {
    HalfPlaneScene scene;
    LoewnerRun run;
    /// Half-plane coordinates.
    std::optional<HullResult> hull;
    std::vector<MotionIntegralReport> motion;
};

LoewnerOutcome run_loewner(const SceneConfig& config, bool hull, bool motion);

struct RunResult {
    std::optional<QuadDifferential> qd;
    std::vector<Trajectory> trajectories;
    std::optional<AsymptoticReport> analysis;
    std::optional<LoewnerOutcome> loewner;
};

/// Computes everything the scene's output request needs.
RunResult run_scene(const SceneConfig& config);

/// Writes the requested artifacts into `out` and returns their file names.
std::vector<std::string> write_artifacts(const SceneConfig& config, const RunResult& result,
                                         const std::filesystem::path& out);

std::string analysis_report(const SceneConfig& config, const RunResult& result);
std::string motion_report(const SceneConfig& config, const LoewnerOutcome& outcome);

/// Distance from z to the polyline.
double polyline_distance(Complex z, std::span<const Complex> polyline);

/// Largest distance from a hull sample of curve j to the trajectory launched
/// from growth point j. Both in half-plane coordinates.
double hull_trajectory_distance(const HullResult& hull, std::span<const Trajectory> trajectories);

enum class Suite { all, invariance, motion, equivalence };
Suite parse_suite(const std::string& name);

struct Check {
    std::string suite;
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string note;
};

struct VerifyReport {
    std::vector<Check> checks;

    bool ok() const;
    int exit_code() const { return ok() ? exit_ok : exit_tolerance; }
    std::string to_text() const;
};

VerifyReport verify(const SceneConfig& config, Suite suite);

}  // namespace sle0
