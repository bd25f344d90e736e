#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "vergekit/depth.hpp"
#include "vergekit/geometry.hpp"

namespace vergekit {

enum class ControlMode { StimulusGuided, SelfControl };

/// Stands in for the closed state's "-inf" window depth; a negative depth is
/// never a valid gamma.
inline constexpr double kSentinelClosed = -1.0;

struct ControlConfig {
    double w{1.0};              // user-wall distance, meters; valid range (0.5, 3]
    double delta{0.3};          // activation margin, meters
    double j{2.0};              // scale factor > 1
    double filter_window{1.0};  // seconds
    double sample_rate{30.0};   // Hz
    ControlMode mode{ControlMode::SelfControl};
    double stimulus_distance{6.0}; // meters
    double stimulus_edge{0.10};    // meters
    double stimulus_alpha{0.5};

    void validate() const;
    double open_threshold() const { return w + delta; }
    double open_gamma() const { return w + j * delta; }
};

struct ControlState {
    std::deque<std::pair<double, double>> buffer; // (timestamp, depth)
    bool window_open{false};
    double gamma{kSentinelClosed};
    std::optional<Vec3> window_pose;
};

/// Sliding mean filter. Evicts samples older than t - filter_window, appends
/// (t, depth) and returns the buffer mean. Timestamps must strictly increase.
double filter_push(ControlState& state, const ControlConfig& cfg, double t, double depth);

enum class ControlEventKind { NoChange, Opened, Closed, LayerChanged };

const char* to_string(ControlEventKind k);

struct StimulusRecord {
    Vec3 position;
    double edge;
    double alpha;
};

struct ControlEvent {
    ControlEventKind kind{ControlEventKind::NoChange};
    double t{0.0};
    double gamma{kSentinelClosed};
    std::optional<Vec3> window_pose;
    std::optional<int> layer_index;
    std::optional<StimulusRecord> stimulus;
};

/// One trigger-logic step: opens when the filtered depth exceeds w + delta
/// (strict), placing the window at eye_mid + gamma * gaze with gamma = w + j*delta;
/// closes otherwise. While open the pose tracks the gaze ray at fixed gamma.
ControlEvent control_step(ControlState& state, const ControlConfig& cfg, const Ray& gaze,
                          const Vec3& eye_mid, double phi);

/// Guiding stimulus placed a fixed distance along the gaze ray (SG mode only).
StimulusRecord stimulus_pose(const Ray& gaze, const Vec3& eye_mid, const ControlConfig& cfg);

struct Layer {
    double lo, hi;        // depth range (lo, hi], meters; last hi may be +inf
    double display_depth; // meters
};

struct LayerTable {
    std::vector<Layer> layers;

    void validate() const;
    /// Four-layer table: (0,0.6]@0.3, (0.6,1.4]@1.0, (1.4,3]@2.2, (3,inf)@4.5.
    static LayerTable default_table();
};

/// Index of the unique layer whose range contains phi.
int layer_select(double phi, const LayerTable& table);

struct ControlInput {
    double t;
    DepthEstimate estimate;
    Ray gaze;
    Vec3 eye_mid;
};

/// Runs the filter + trigger over a stream, returning only the transition
/// events (Opened / Closed). In SG mode events carry the stimulus record.
std::vector<ControlEvent> run_control(const std::vector<ControlInput>& stream,
                                      const ControlConfig& cfg);

} // namespace vergekit
