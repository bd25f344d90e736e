#include "vergekit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vergekit {

ErrorTable evaluate_depth(const std::vector<EstimateTruthPair>& pairs) {
    static constexpr double kEdges[] = {0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    constexpr int kBins = 6;

    std::vector<std::vector<double>> errors(kBins);
    for (const auto& p : pairs) {
        if (!(p.truth > kEdges[0] && p.truth <= kEdges[kBins])) {
            throw OutOfRangeTruth("evaluate_depth: truth outside (0.5, 6] m");
        }
        int bin = kBins - 1;
        for (int b = 0; b < kBins; ++b) {
            if (p.truth > kEdges[b] && p.truth <= kEdges[b + 1]) {
                bin = b;
                break;
            }
        }
        errors[static_cast<std::size_t>(bin)].push_back(std::abs(p.estimate - p.truth));
    }

    ErrorTable table;
    for (int b = 0; b < kBins; ++b) {
        const auto& e = errors[static_cast<std::size_t>(b)];
        if (e.empty()) continue;
        const double n = static_cast<double>(e.size());
        double mean = 0.0;
        for (double v : e) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : e) var += (v - mean) * (v - mean);
        table.bins.push_back(ErrorBin{kEdges[b], kEdges[b + 1], mean, std::sqrt(var / n),
                                      static_cast<int>(e.size())});
    }
    return table;
}

const char* to_string(SessionCommand c) {
    return c == SessionCommand::SeeThroughWall ? "see_through_wall" : "see_wall";
}

void SessionScript::validate() const {
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& c : commands) {
        if (!(c.issue_time > prev)) {
            throw ConfigError("SessionScript: issue times must strictly increase");
        }
        prev = c.issue_time;
    }
    if (!(timeout > 0.0) || !(waiting_duration >= 0.0)) {
        throw ConfigError("SessionScript: timeout must be > 0 and waiting_duration >= 0");
    }
}

SessionMetrics replay_session(const std::vector<ControlEvent>& events,
                              const SessionScript& script) {
    script.validate();
    double prev_t = -std::numeric_limits<double>::infinity();
    std::vector<const ControlEvent*> transitions;
    for (const auto& e : events) {
        if (!(e.t > prev_t)) throw MisorderedLog("replay_session: event log not ordered");
        prev_t = e.t;
        if (e.kind == ControlEventKind::Opened || e.kind == ControlEventKind::Closed) {
            transitions.push_back(&e);
        }
    }

    SessionMetrics metrics;
    struct Window {
        double begin, end;
        const ControlEvent* success; // the transition that opened the window
    };
    std::vector<Window> waiting;

    for (const auto& cmd : script.commands) {
        const ControlEventKind wanted = cmd.command == SessionCommand::SeeThroughWall
                                            ? ControlEventKind::Opened
                                            : ControlEventKind::Closed;
        const ControlEvent* match = nullptr;
        for (const ControlEvent* e : transitions) {
            if (e->t >= cmd.issue_time && e->kind == wanted) {
                match = e;
                break;
            }
        }
        if (match != nullptr && match->t - cmd.issue_time <= script.timeout) {
            metrics.successes += 1;
            metrics.completion_times.push_back(match->t - cmd.issue_time);
            waiting.push_back(Window{match->t, match->t + script.waiting_duration, match});
        }
        // A correct transition after the timeout counts as neither success nor mistake.
    }

    for (const ControlEvent* e : transitions) {
        const bool is_success = std::any_of(waiting.begin(), waiting.end(),
                                            [&](const Window& w) { return w.success == e; });
        if (is_success) continue;
        for (const Window& w : waiting) {
            if (e->t > w.begin && e->t <= w.end) {
                metrics.mistakes += 1;
                break;
            }
        }
    }
    return metrics;
}

} // namespace vergekit
