// vergekit command-line front end: simulate / calibrate / estimate / control /
// warp / evaluate, all file-based and deterministic for a fixed seed.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "vergekit/depth.hpp"
#include "vergekit/eval.hpp"
#include "vergekit/io.hpp"

using namespace vergekit;

namespace {

std::uint64_t effective_seed(std::uint64_t cli_seed) {
    if (const char* env = std::getenv("VERGEKIT_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("VERGEKIT_SEED is not a valid unsigned integer");
        }
    }
    return cli_seed;
}

SubjectModel subject_or_default(const std::string& path, double head_height) {
    if (path.empty()) return SubjectModel::default_subject(head_height);
    return io::load_subject(path);
}

Vec3 parse_vec3_arg(const std::string& s, const std::string& flag) {
    const std::size_t c1 = s.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : s.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        s.find(',', c2 + 1) != std::string::npos) {
        throw ConfigError(flag + " expects 'x,y,z'");
    }
    try {
        return Vec3(io::parse_double(s.substr(0, c1)),
                    io::parse_double(s.substr(c1 + 1, c2 - c1 - 1)),
                    io::parse_double(s.substr(c2 + 1)));
    } catch (const IoError&) {
        throw ConfigError(flag + " expects 'x,y,z'");
    }
}

std::pair<double, double> parse_size_arg(const std::string& s, const std::string& flag) {
    const std::size_t x = s.find('x');
    if (x == std::string::npos || x == 0 || x + 1 >= s.size()) {
        throw ConfigError(flag + " expects '<width>x<height>'");
    }
    try {
        return {io::parse_double(s.substr(0, x)), io::parse_double(s.substr(x + 1))};
    } catch (const IoError&) {
        throw ConfigError(flag + " expects '<width>x<height>'");
    }
}

// --- simulate ------------------------------------------------------------------

struct SimulateArgs {
    std::string subject, scene, script, out;
    double noise_deg = 0.0;
    double head_height = 1.6;
    std::uint64_t seed = 0;
};

int run_simulate(const SimulateArgs& args) {
    if (!args.scene.empty() && !args.script.empty()) {
        throw ConfigError("simulate: pass either --scene or --script, not both");
    }
    const SubjectModel subject = subject_or_default(args.subject, args.head_height);
    const double noise = io::deg_to_rad_file(args.noise_deg);
    const std::uint64_t seed = effective_seed(args.seed);
    GazeStream stream;
    if (!args.script.empty()) {
        const auto fixations = io::load_fixation_script(args.script);
        if (fixations.empty()) throw ConfigError("simulate: fixation script is empty");
        stream = simulate_stream(subject, fixations, 30.0, noise, seed);
    } else {
        const CalibrationSceneConfig cfg =
            args.scene.empty() ? CalibrationSceneConfig{} : io::load_scene(args.scene);
        stream = simulate_calibration_stream(subject, cfg, args.head_height, noise, seed);
    }
    io::save_stream(args.out, stream);
    std::cout << "wrote " << stream.samples.size() << " samples to " << args.out << "\n";
    return 0;
}

// --- calibrate -----------------------------------------------------------------

struct CalibrateArgs {
    std::string stream, subject, out_bundle;
    std::string mipd_norm = "euclidean";
    std::uint64_t seed = 0;
};

int run_calibrate(const CalibrateArgs& args) {
    const SubjectModel subject = subject_or_default(args.subject, 1.6);
    const GazeStream stream = io::load_stream(args.stream);

    std::vector<CalibrationSample> samples;
    for (const auto& s : stream.samples) {
        if (s.truth_fixation) samples.push_back(CalibrationSample{s.pair, *s.truth_fixation});
    }
    if (samples.empty()) {
        throw ConfigError("calibrate: stream carries no ground-truth fixations");
    }

    IpdOptions opts;
    opts.image_width = subject.eye_cam_left.camera.width;
    if (args.mipd_norm == "l1") {
        opts.mipd_norm = MipdNorm::L1;
    } else if (args.mipd_norm != "euclidean") {
        throw ConfigError("calibrate: --mipd-norm must be 'euclidean' or 'l1'");
    }

    RansacConfig ransac;
    ransac.seed = effective_seed(args.seed);

    const RigGeometry rig = subject.geometry();
    CalibrationBundle bundle;

    const KappaFitResult kappa = fit_kappa(samples, rig);
    bundle.kappa = kappa.kappa;
    bundle.kappa_residual_rad = kappa.residual_rms_rad;
    std::cout << "kappa residual RMS: " << io::fmt(kappa.residual_rms_rad) << " rad\n";

    const std::array<double, 2> boundaries = {-deg2rad(6.0), deg2rad(6.0)};
    const SectoredFitResult mipd =
        fit_sectored(samples, boundaries, ransac, rig, IpdUnits::Millimeters, opts);
    const SectoredFitResult pipd =
        fit_sectored(samples, boundaries, ransac, rig, IpdUnits::Pixels, opts);
    bundle.mipd = mipd.regression;
    bundle.pipd = pipd.regression;
    for (int k = 0; k < 3; ++k) {
        std::cout << "sector " << k << " fit RMS: mipd " << io::fmt(mipd.sector_rms[k])
                  << " m (" << mipd.sector_counts[k] << " samples), pipd "
                  << io::fmt(pipd.sector_rms[k]) << " m\n";
    }

    // Threshold table from the fused estimator replayed on the calibration data.
    std::vector<EstimateTruthPair> pairs;
    for (const auto& s : samples) {
        const double truth = (s.target - rig.eye_mid()).norm();
        if (!(truth > 0.5 && truth <= 6.0)) continue;
        try {
            const auto rays = gaze_rays_from_pupils(s.pair, kappa.kappa, rig);
            pairs.push_back({depth_fused(s.pair, rays, pipd.regression, opts).depth, truth});
        } catch (const NumericError&) {
            // sample skipped; the table is built from the estimable ones
        }
    }
    if (!pairs.empty()) {
        const ErrorTable table = evaluate_depth(pairs);
        std::vector<BinErrorStat> stats;
        for (const auto& b : table.bins) {
            // Floor keeps noiseless synthetic calibrations from producing a
            // zero (rejected) threshold.
            stats.push_back(BinErrorStat{b.lo, b.hi, b.mean_abs_error,
                                         std::max(b.stddev, 1e-6)});
        }
        bundle.thresholds = build_threshold_table(stats);
    }

    io::save_bundle(args.out_bundle, bundle);
    std::cout << "wrote bundle to " << args.out_bundle << "\n";
    return 0;
}

// --- estimate ------------------------------------------------------------------

struct EstimateArgs {
    std::string stream, bundle, subject, out;
    std::string method = "fused";
    std::string mipd_norm = "euclidean";
};

int run_estimate(const EstimateArgs& args) {
    const SubjectModel subject = subject_or_default(args.subject, 1.6);
    const GazeStream stream = io::load_stream(args.stream);
    const CalibrationBundle bundle = io::load_bundle(args.bundle);
    const RigGeometry rig = subject.geometry();

    if (!bundle.kappa) throw ModelMissing("estimate: bundle has no kappa section");
    if (args.method == "mipd" && !bundle.mipd) {
        throw ModelMissing("estimate: bundle has no millimeter regression section");
    }
    if ((args.method == "pipd" || args.method == "fused") && !bundle.pipd) {
        throw ModelMissing("estimate: bundle has no pixel regression section");
    }

    IpdOptions opts;
    opts.image_width = subject.eye_cam_left.camera.width;
    if (args.mipd_norm == "l1") opts.mipd_norm = MipdNorm::L1;

    std::vector<io::EstimateRecord> records;
    std::size_t failures = 0;
    for (const auto& s : stream.samples) {
        try {
            const auto rays = gaze_rays_from_pupils(s.pair, *bundle.kappa, rig);
            DepthEstimate est;
            if (args.method == "losi") {
                est = depth_losi(rays);
            } else if (args.method == "mipd") {
                est = depth_regress(ipd_mm(s.pair, opts), *bundle.mipd,
                                    rays.horizontal_angle());
            } else if (args.method == "pipd") {
                est = depth_regress(ipd_px(s.pair, opts), *bundle.pipd,
                                    rays.horizontal_angle());
            } else if (args.method == "fused") {
                est = depth_fused(s.pair, rays, *bundle.pipd, opts);
            } else {
                throw ConfigError("estimate: unknown method '" + args.method + "'");
            }
            const DepthMethod reported =
                est.method == DepthMethod::Fused ? *est.fused_source : est.method;
            records.push_back(io::EstimateRecord{s.pair.timestamp, est.depth,
                                                 to_string(reported), s.truth_depth});
        } catch (const PupilOffSphere&) {
            ++failures;
        } catch (const DivergentRays&) {
            ++failures;
        } catch (const DegenerateRays&) {
            ++failures;
        } catch (const OutOfImage&) {
            ++failures;
        }
    }
    io::save_estimates(args.out, records);
    std::cout << "wrote " << records.size() << " estimates to " << args.out;
    if (failures > 0) std::cout << " (" << failures << " samples not estimable)";
    std::cout << "\n";
    return 0;
}

// --- control -------------------------------------------------------------------

struct ControlArgs {
    std::string stream, bundle, subject, out_events;
    std::string mode = "sc";
    double w = 1.0;
    double j = 2.0;
    double filter_window = 1.0;
    double delta = -1.0; // <0: take it from the bundle threshold table at w
};

int run_control(const ControlArgs& args) {
    const SubjectModel subject = subject_or_default(args.subject, 1.6);
    const GazeStream stream = io::load_stream(args.stream);
    const CalibrationBundle bundle = io::load_bundle(args.bundle);
    const RigGeometry rig = subject.geometry();

    if (!bundle.kappa) throw ModelMissing("control: bundle has no kappa section");
    if (!bundle.pipd) throw ModelMissing("control: bundle has no pixel regression section");

    ControlConfig cfg;
    cfg.w = args.w;
    cfg.j = args.j;
    cfg.filter_window = args.filter_window;
    if (args.mode == "sg") {
        cfg.mode = ControlMode::StimulusGuided;
    } else if (args.mode == "sc") {
        cfg.mode = ControlMode::SelfControl;
    } else {
        throw ConfigError("control: --mode must be 'sg' or 'sc'");
    }
    if (args.delta >= 0.0) {
        cfg.delta = args.delta;
    } else {
        if (!bundle.thresholds) {
            throw ModelMissing("control: bundle has no threshold table; pass --delta");
        }
        cfg.delta = bundle.thresholds->delta_at(args.w);
    }
    cfg.validate();

    IpdOptions opts;
    opts.image_width = subject.eye_cam_left.camera.width;

    std::vector<ControlInput> inputs;
    std::size_t skipped = 0;
    for (const auto& s : stream.samples) {
        try {
            const auto rays = gaze_rays_from_pupils(s.pair, *bundle.kappa, rig);
            const auto est = depth_fused(s.pair, rays, *bundle.pipd, opts);
            const Vec3 dir = (rays.left.direction + rays.right.direction).normalized();
            inputs.push_back(ControlInput{s.pair.timestamp, est,
                                          Ray(rays.eye_center_mid, dir),
                                          rays.eye_center_mid});
        } catch (const NumericError&) {
            ++skipped;
        }
    }
    const auto events = vergekit::run_control(inputs, cfg);
    io::save_events(args.out_events, events);
    std::size_t opened = 0, closed = 0;
    for (const auto& e : events) {
        (e.kind == ControlEventKind::Opened ? opened : closed) += 1;
    }
    std::cout << "delta " << io::fmt(cfg.delta) << " m, " << opened << " opened, " << closed
              << " closed events to " << args.out_events;
    if (skipped > 0) std::cout << " (" << skipped << " samples not estimable)";
    std::cout << "\n";
    return 0;
}

// --- warp ----------------------------------------------------------------------

struct WarpArgs {
    std::string frame, rig, out;
    std::string por, gaze;
    std::string roi_size = "0.6x0.45";
    std::string out_size = "800x600";
};

int run_warp(const WarpArgs& args) {
    const RasterImage frame = io::load_image(args.frame);
    const io::RigSpec rig = io::load_rig(args.rig);
    const Vec3 por = parse_vec3_arg(args.por, "--por");
    const Vec3 gaze_dir = parse_vec3_arg(args.gaze, "--gaze");
    const auto [roi_w, roi_h] = parse_size_arg(args.roi_size, "--roi-size");
    const auto [out_w, out_h] = parse_size_arg(args.out_size, "--out-size");
    if (!(roi_w > 0.0 && roi_h > 0.0)) throw ConfigError("--roi-size must be positive");
    if (out_w < 2 || out_h < 2) throw ConfigError("--out-size must be at least 2x2");

    const Ray gaze(por - gaze_dir.normalized(), gaze_dir); // origin 1 m behind the PoR
    const auto result = see_through_frame(por, gaze, roi_w, roi_h, rig.world_to_cam,
                                          rig.camera, frame, static_cast<int>(out_w),
                                          static_cast<int>(out_h));
    io::save_image(args.out, result.image);
    std::cout << "wrote " << args.out;
    if (result.out_of_frame) std::cout << " (ROI partly outside the camera frame)";
    std::cout << "\n";
    return 0;
}

// --- evaluate ---------------------------------------------------------------------

struct EvaluateArgs {
    std::string estimates, events, script, out;
};

int run_evaluate(const EvaluateArgs& args) {
    const bool have_estimates = !args.estimates.empty();
    const bool have_events = !args.events.empty() || !args.script.empty();
    if (have_estimates == have_events) {
        throw ConfigError("evaluate: pass either --estimates or --events with --script");
    }
    if (have_estimates) {
        const auto records = io::load_estimates(args.estimates);
        std::vector<EstimateTruthPair> pairs;
        for (const auto& r : records) {
            if (r.truth) pairs.push_back({r.depth, *r.truth});
        }
        if (pairs.empty()) {
            throw ConfigError("evaluate: no estimates with ground truth in " + args.estimates);
        }
        io::save_error_table(args.out, evaluate_depth(pairs));
    } else {
        if (args.events.empty() || args.script.empty()) {
            throw ConfigError("evaluate: --events and --script are both required");
        }
        const auto events = io::load_events(args.events);
        const auto script = io::load_session_script(args.script);
        if (script.commands.empty()) throw ConfigError("evaluate: script has no commands");
        if (events.empty()) {
            throw ConfigError("evaluate: event log is empty (mismatched time bases?)");
        }
        if (events.back().t < script.commands.front().issue_time) {
            throw ConfigError("evaluate: event log ends before the first command "
                              "(mismatched time bases?)");
        }
        io::save_session_metrics(args.out, replay_session(events, script));
    }
    std::cout << "wrote " << args.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vergekit: gaze-vergence depth estimation and see-through control toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic gaze stream");
    simulate->add_option("--subject", sim.subject, "Subject model file (default: built-in)");
    simulate->add_option("--scene", sim.scene, "Calibration scene file (default scene if omitted)");
    simulate->add_option("--script", sim.script, "Fixation script file (overrides --scene)");
    simulate->add_option("--noise", sim.noise_deg, "Angular noise std in degrees");
    simulate->add_option("--seed", sim.seed, "RNG seed (VERGEKIT_SEED overrides)");
    simulate->add_option("--head-height", sim.head_height, "Head height in meters");
    simulate->add_option("--out", sim.out, "Output stream file")->required();

    CalibrateArgs cal;
    auto* calibrate = app.add_subcommand("calibrate", "Fit kappa, IPD regressions and thresholds");
    calibrate->add_option("--stream", cal.stream, "Calibration stream with ground truth")
        ->required();
    calibrate->add_option("--subject", cal.subject, "Subject model file (default: built-in)");
    calibrate->add_option("--mipd-norm", cal.mipd_norm, "euclidean|l1 (default euclidean)");
    calibrate->add_option("--seed", cal.seed, "RANSAC seed (VERGEKIT_SEED overrides)");
    calibrate->add_option("--out-bundle", cal.out_bundle, "Output bundle file")->required();

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Replay a stream through one estimator");
    estimate->add_option("--stream", est.stream, "Input stream file")->required();
    estimate->add_option("--bundle", est.bundle, "Calibration bundle")->required();
    estimate->add_option("--method", est.method, "losi|mipd|pipd|fused")
        ->check(CLI::IsMember({"losi", "mipd", "pipd", "fused"}));
    estimate->add_option("--subject", est.subject, "Subject model file (default: built-in)");
    estimate->add_option("--mipd-norm", est.mipd_norm, "euclidean|l1 (default euclidean)");
    estimate->add_option("--out", est.out, "Output estimates CSV")->required();

    ControlArgs ctl;
    auto* control = app.add_subcommand("control", "Run the see-through trigger state machine");
    control->add_option("--stream", ctl.stream, "Input stream file")->required();
    control->add_option("--bundle", ctl.bundle, "Calibration bundle")->required();
    control->add_option("--mode", ctl.mode, "sg|sc")->check(CLI::IsMember({"sg", "sc"}));
    control->add_option("--w", ctl.w, "User-wall distance in meters, (0.5, 3]")->required();
    control->add_option("--j", ctl.j, "Scale factor j > 1 (default 2)");
    control->add_option("--filter-window", ctl.filter_window, "Mean filter window, seconds");
    control->add_option("--delta", ctl.delta, "Threshold override in meters (default: bundle)");
    control->add_option("--out-events", ctl.out_events, "Output event log")->required();

    WarpArgs warp;
    auto* warp_cmd = app.add_subcommand("warp", "Warp a hidden-camera frame into the view");
    warp_cmd->add_option("--frame", warp.frame, "Hidden camera frame (binary PPM/PGM)")
        ->required();
    warp_cmd->add_option("--rig", warp.rig, "Hidden camera rig file")->required();
    warp_cmd->add_option("--por", warp.por, "Point of regard 'x,y,z' in meters")->required();
    warp_cmd->add_option("--gaze", warp.gaze, "Gaze direction 'x,y,z'")->required();
    warp_cmd->add_option("--roi-size", warp.roi_size, "ROI size in meters (default 0.6x0.45)");
    warp_cmd->add_option("--out-size", warp.out_size, "Output size in pixels (default 800x600)");
    warp_cmd->add_option("--out", warp.out, "Output image (binary PPM/PGM)")->required();

    EvaluateArgs eval;
    auto* evaluate = app.add_subcommand("evaluate", "Error tables or session metrics");
    evaluate->add_option("--estimates", eval.estimates, "Estimates CSV (error-table mode)");
    evaluate->add_option("--events", eval.events, "Event log (session-metrics mode)");
    evaluate->add_option("--script", eval.script, "Session script (session-metrics mode)");
    evaluate->add_option("--out", eval.out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim);
        if (calibrate->parsed()) return run_calibrate(cal);
        if (estimate->parsed()) return run_estimate(est);
        if (control->parsed()) return run_control(ctl);
        if (warp_cmd->parsed()) return run_warp(warp);
        if (evaluate->parsed()) return run_evaluate(eval);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
