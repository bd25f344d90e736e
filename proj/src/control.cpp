#include "vergekit/control.hpp"

#include <cmath>
#include <limits>

namespace vergekit {

void ControlConfig::validate() const {
    if (!(w > 0.5 && w <= 3.0)) throw ConfigError("ControlConfig: w must lie in (0.5, 3] m");
    if (!(delta > 0.0)) throw ConfigError("ControlConfig: delta must be > 0");
    if (!(j > 1.0)) throw ConfigError("ControlConfig: j must be > 1");
    if (!(filter_window > 0.0)) throw ConfigError("ControlConfig: filter_window must be > 0");
    if (!(sample_rate > 0.0)) throw ConfigError("ControlConfig: sample_rate must be > 0");
    if (!(stimulus_distance > 0.0) || !(stimulus_edge > 0.0)) {
        throw ConfigError("ControlConfig: stimulus parameters must be > 0");
    }
    if (!(stimulus_alpha >= 0.0 && stimulus_alpha <= 1.0)) {
        throw ConfigError("ControlConfig: stimulus_alpha must be in [0, 1]");
    }
}

const char* to_string(ControlEventKind k) {
    switch (k) {
        case ControlEventKind::NoChange: return "nochange";
        case ControlEventKind::Opened: return "opened";
        case ControlEventKind::Closed: return "closed";
        case ControlEventKind::LayerChanged: return "layer";
    }
    return "unknown";
}

double filter_push(ControlState& state, const ControlConfig& cfg, double t, double depth) {
    if (!state.buffer.empty() && !(t > state.buffer.back().first)) {
        throw NonMonotonicTimestamp("filter_push: timestamps must strictly increase");
    }
    const double horizon = t - cfg.filter_window;
    while (!state.buffer.empty() && state.buffer.front().first < horizon) {
        state.buffer.pop_front();
    }
    state.buffer.emplace_back(t, depth);
    double sum = 0.0;
    for (const auto& [ts, d] : state.buffer) sum += d;
    return sum / static_cast<double>(state.buffer.size());
}

ControlEvent control_step(ControlState& state, const ControlConfig& cfg, const Ray& gaze,
                          const Vec3& eye_mid, double phi) {
    if (!std::isfinite(phi)) throw ConfigError("control_step: phi must be finite");
    ControlEvent ev;
    if (phi > cfg.open_threshold()) {
        const bool was_open = state.window_open;
        state.window_open = true;
        state.gamma = cfg.open_gamma();
        state.window_pose = eye_mid + state.gamma * gaze.direction;
        ev.kind = was_open ? ControlEventKind::NoChange : ControlEventKind::Opened;
        ev.gamma = state.gamma;
        ev.window_pose = state.window_pose;
    } else {
        const bool was_open = state.window_open;
        state.window_open = false;
        state.gamma = kSentinelClosed;
        state.window_pose.reset();
        ev.kind = was_open ? ControlEventKind::Closed : ControlEventKind::NoChange;
        ev.gamma = kSentinelClosed;
    }
    return ev;
}

StimulusRecord stimulus_pose(const Ray& gaze, const Vec3& eye_mid, const ControlConfig& cfg) {
    if (cfg.mode != ControlMode::StimulusGuided) {
        throw WrongMode("stimulus_pose: only meaningful in stimulus-guided mode");
    }
    return StimulusRecord{eye_mid + cfg.stimulus_distance * gaze.direction, cfg.stimulus_edge,
                          cfg.stimulus_alpha};
}

void LayerTable::validate() const {
    if (layers.empty()) throw ConfigError("LayerTable: empty");
    if (std::abs(layers.front().lo) > 1e-12) throw ConfigError("LayerTable: must start at 0");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (!(l.hi > l.lo)) throw ConfigError("LayerTable: ranges must be increasing");
        if (!(l.display_depth > l.lo && l.display_depth <= l.hi) &&
            !(std::isinf(l.hi) && l.display_depth > l.lo)) {
            throw ConfigError("LayerTable: display depth outside its range");
        }
        if (i > 0 && std::abs(layers[i - 1].hi - l.lo) > 1e-12) {
            throw ConfigError("LayerTable: ranges must be contiguous");
        }
    }
    if (!std::isinf(layers.back().hi)) throw ConfigError("LayerTable: must extend to +inf");
}

LayerTable LayerTable::default_table() {
    const double inf = std::numeric_limits<double>::infinity();
    return LayerTable{{{0.0, 0.6, 0.3}, {0.6, 1.4, 1.0}, {1.4, 3.0, 2.2}, {3.0, inf, 4.5}}};
}

int layer_select(double phi, const LayerTable& table) {
    if (!(phi > 0.0)) throw ConfigError("layer_select: phi must be > 0");
    for (std::size_t i = 0; i < table.layers.size(); ++i) {
        if (phi > table.layers[i].lo && phi <= table.layers[i].hi) return static_cast<int>(i);
    }
    throw ConfigError("layer_select: no layer contains phi");
}

std::vector<ControlEvent> run_control(const std::vector<ControlInput>& stream,
                                      const ControlConfig& cfg) {
    cfg.validate();
    ControlState state;
    std::vector<ControlEvent> events;
    for (const auto& in : stream) {
        const double phi = filter_push(state, cfg, in.t, in.estimate.depth);
        ControlEvent ev = control_step(state, cfg, in.gaze, in.eye_mid, phi);
        if (ev.kind == ControlEventKind::Opened || ev.kind == ControlEventKind::Closed) {
            ev.t = in.t;
            if (cfg.mode == ControlMode::StimulusGuided) {
                ev.stimulus = stimulus_pose(in.gaze, in.eye_mid, cfg);
            }
            events.push_back(std::move(ev));
        }
    }
    return events;
}

} // namespace vergekit
