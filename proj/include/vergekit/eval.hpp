#pragma once

#include <vector>

#include "vergekit/control.hpp"

namespace vergekit {

struct ErrorBin {
    double lo, hi;          // truth range (lo, hi], meters
    double mean_abs_error;  // meters
    double stddev;          // population standard deviation, meters
    int n;
};

struct ErrorTable {
    std::vector<ErrorBin> bins; // only populated bins are reported
};

struct EstimateTruthPair {
    double estimate;
    double truth;
};

/// Per-distance-bin |d_hat - d| statistics over the six bins
/// (0.5,1], (1,2], ..., (5,6]. Truths on a bin edge go to the lower bin.
ErrorTable evaluate_depth(const std::vector<EstimateTruthPair>& pairs);

enum class SessionCommand { SeeThroughWall, SeeWall };

const char* to_string(SessionCommand c);

struct ScriptedCommand {
    double issue_time; // seconds
    SessionCommand command;
};

struct SessionScript {
    std::vector<ScriptedCommand> commands; // issue times strictly increasing
    double timeout{10.0};
    double waiting_duration{5.0};
    int repetitions{5};

    void validate() const;
};

struct SessionMetrics {
    std::vector<double> completion_times; // one entry per success
    int successes{0};
    int mistakes{0};
};

/// Replays a control event log against a session script: completion time is
/// the delay to the first correct transition within the timeout; transitions
/// inside a post-success waiting window count as mistakes.
SessionMetrics replay_session(const std::vector<ControlEvent>& events,
                              const SessionScript& script);

} // namespace vergekit
