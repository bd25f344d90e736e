#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vergekit/calibration.hpp"
#include "vergekit/control.hpp"
#include "vergekit/eval.hpp"
#include "vergekit/eye_sim.hpp"
#include "vergekit/scene.hpp"

namespace vergekit::io {

/// Shortest decimal form that parses back to the same double.
std::string fmt(double v);
double parse_double(const std::string& s);

/// File-boundary angle conversions. Files carry degrees, the library works in
/// radians; the long double intermediate makes deg->rad->deg round trips exact
/// for double inputs on x86-64.
double rad_to_deg_file(double rad);
double deg_to_rad_file(double deg);

using Path = std::filesystem::path;

// --- subject / scene / scripts -------------------------------------------

void save_subject(const Path& path, const SubjectModel& subject);
SubjectModel load_subject(const Path& path);

void save_scene(const Path& path, const CalibrationSceneConfig& cfg);
CalibrationSceneConfig load_scene(const Path& path);

void save_fixation_script(const Path& path, const std::vector<ScriptedFixation>& script);
std::vector<ScriptedFixation> load_fixation_script(const Path& path);

void save_session_script(const Path& path, const SessionScript& script);
SessionScript load_session_script(const Path& path);

// --- gaze streams ----------------------------------------------------------

void save_stream(const Path& path, const GazeStream& stream);
GazeStream load_stream(const Path& path);

// --- calibration bundles ----------------------------------------------------

void save_bundle(const Path& path, const CalibrationBundle& bundle);
CalibrationBundle load_bundle(const Path& path);

// --- control event logs -----------------------------------------------------

void save_events(const Path& path, const std::vector<ControlEvent>& events);
std::vector<ControlEvent> load_events(const Path& path);

// --- estimates and evaluation outputs ---------------------------------------

struct EstimateRecord {
    double t;
    double depth;
    std::string method;
    std::optional<double> truth;
};

void save_estimates(const Path& path, const std::vector<EstimateRecord>& records);
std::vector<EstimateRecord> load_estimates(const Path& path);

void save_error_table(const Path& path, const ErrorTable& table);
void save_session_metrics(const Path& path, const SessionMetrics& metrics);

// --- hidden-camera rig -------------------------------------------------------

struct RigSpec {
    PinholeCamera camera;
    RigidTransform world_to_cam; // maps the user/world frame H into camera C
};

void save_rig(const Path& path, const RigSpec& rig);
RigSpec load_rig(const Path& path);

// --- raster images (binary PPM / PGM) ---------------------------------------

void save_image(const Path& path, const RasterImage& image);
RasterImage load_image(const Path& path);

} // namespace vergekit::io
