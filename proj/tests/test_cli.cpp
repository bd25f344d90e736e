#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "vergekit/io.hpp"

using namespace vergekit;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("VERGEKIT_CLI");
    REQUIRE_MESSAGE(env != nullptr, "VERGEKIT_CLI must point at the vergekit binary");
    return env;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("vergekit_cli_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("cli: simulate produces the 18-target calibration stream deterministically") {
    TempDir dir;
    CHECK(run("simulate --noise 0 --seed 1 --out " + dir.file("a.stream")) == 0);
    CHECK(run("simulate --noise 0 --seed 1 --out " + dir.file("b.stream")) == 0);
    CHECK(slurp(dir.file("a.stream")) == slurp(dir.file("b.stream")));

    const GazeStream stream = io::load_stream(dir.file("a.stream"));
    CHECK(stream.samples.size() == 18 * 30);
    int targets = 1;
    for (std::size_t i = 1; i < stream.samples.size(); ++i) {
        if ((*stream.samples[i].truth_fixation - *stream.samples[i - 1].truth_fixation)
                .norm() > 1e-12) {
            ++targets;
        }
    }
    CHECK(targets == 18);
}

TEST_CASE("cli: simulate with noise is seed-reproducible") {
    TempDir dir;
    CHECK(run("simulate --noise 0.5 --seed 7 --out " + dir.file("a.stream")) == 0);
    CHECK(run("simulate --noise 0.5 --seed 7 --out " + dir.file("b.stream")) == 0);
    CHECK(run("simulate --noise 0.5 --seed 8 --out " + dir.file("c.stream")) == 0);
    CHECK(slurp(dir.file("a.stream")) == slurp(dir.file("b.stream")));
    CHECK(slurp(dir.file("a.stream")) != slurp(dir.file("c.stream")));
}

TEST_CASE("cli: VERGEKIT_SEED overrides --seed") {
    TempDir dir;
    const std::string cmd = "VERGEKIT_SEED=42 " + cli_path() +
                            " simulate --noise 0.5 --seed 1 --out " + dir.file("env.stream") +
                            " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(run("simulate --noise 0.5 --seed 42 --out " + dir.file("direct.stream")) == 0);
    CHECK(slurp(dir.file("env.stream")) == slurp(dir.file("direct.stream")));
}

TEST_CASE("cli: missing subject file exits 2 and names the path") {
    TempDir dir;
    const std::string cmd = cli_path() + " simulate --subject " + dir.file("missing.subj") +
                            " --out " + dir.file("x.stream") + " 2> " + dir.file("err.txt");
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 2);
    CHECK(slurp(dir.file("err.txt")).find("missing.subj") != std::string::npos);
}

TEST_CASE("cli: calibrate is byte-deterministic and fails cleanly on tiny streams") {
    TempDir dir;
    REQUIRE(run("simulate --noise 0 --seed 1 --out " + dir.file("cal.stream")) == 0);
    const std::string cmd = cli_path() + " calibrate --stream " + dir.file("cal.stream") +
                            " --out-bundle " + dir.file("a.bundle") + " > " +
                            dir.file("log.txt") + " 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(run("calibrate --stream " + dir.file("cal.stream") + " --out-bundle " +
              dir.file("b.bundle")) == 0);
    CHECK(slurp(dir.file("a.bundle")) == slurp(dir.file("b.bundle")));

    // Reports the kappa residual and per-sector fit quality. The exponential
    // family leaves ~0.16 m RMS against the simulated curve (see the depth
    // test on the global optimum), so the printed values stay under 0.3 m.
    const std::string log = slurp(dir.file("log.txt"));
    CHECK(log.find("kappa residual RMS") != std::string::npos);
    std::size_t at = 0;
    int rms_values = 0;
    while ((at = log.find(" fit RMS: mipd ", at)) != std::string::npos) {
        at += 15;
        const double rms = std::stod(log.substr(at));
        CHECK(rms < 0.3);
        ++rms_values;
    }
    CHECK(rms_values == 3);

    // Two-sample stream: kappa fit must report InsufficientSamples -> exit 3.
    GazeStream stream = io::load_stream(dir.file("cal.stream"));
    GazeStream tiny;
    tiny.samples = {stream.samples[0], stream.samples[1]};
    io::save_stream(dir.file("tiny.stream"), tiny);
    CHECK(run("calibrate --stream " + dir.file("tiny.stream") + " --out-bundle " +
              dir.file("tiny.bundle")) == 3);
}

TEST_CASE("cli: estimate per method, fused source column, exit codes") {
    TempDir dir;
    REQUIRE(run("simulate --noise 0 --seed 1 --out " + dir.file("cal.stream")) == 0);
    REQUIRE(run("calibrate --stream " + dir.file("cal.stream") + " --out-bundle " +
                dir.file("cal.bundle")) == 0);

    // losi on noiseless data reproduces the truth almost exactly.
    CHECK(run("estimate --stream " + dir.file("cal.stream") + " --bundle " +
              dir.file("cal.bundle") + " --method losi --out " + dir.file("losi.csv")) == 0);
    const auto losi = io::load_estimates(dir.file("losi.csv"));
    REQUIRE(!losi.empty());
    for (const auto& r : losi) {
        REQUIRE(r.truth.has_value());
        CHECK(std::abs(r.depth - *r.truth) < 1e-6);
        CHECK(r.method == "losi");
    }

    // fused marks each row with the estimator that produced it (the PIPD gate).
    CHECK(run("estimate --stream " + dir.file("cal.stream") + " --bundle " +
              dir.file("cal.bundle") + " --method fused --out " + dir.file("fused.csv")) == 0);
    const auto fused = io::load_estimates(dir.file("fused.csv"));
    bool saw_losi = false, saw_pipd = false;
    for (const auto& r : fused) {
        CHECK((r.method == "losi" || r.method == "pipd"));
        saw_losi |= r.method == "losi";
        saw_pipd |= r.method == "pipd";
    }
    CHECK(saw_losi); // near targets fall in the (0.5, 2] gate
    CHECK(saw_pipd); // far targets do not

    // Unknown method flag is a usage error.
    CHECK(run("estimate --stream " + dir.file("cal.stream") + " --bundle " +
              dir.file("cal.bundle") + " --method nonsense --out " + dir.file("x.csv")) == 2);

    // Bundle without the mm section: mipd estimation exits 3.
    CalibrationBundle bundle = io::load_bundle(dir.file("cal.bundle"));
    bundle.mipd.reset();
    io::save_bundle(dir.file("nomm.bundle"), bundle);
    CHECK(run("estimate --stream " + dir.file("cal.stream") + " --bundle " +
              dir.file("nomm.bundle") + " --method mipd --out " + dir.file("x.csv")) == 3);
}

TEST_CASE("cli: control emits one Opened and one Closed for a step script") {
    TempDir dir;
    REQUIRE(run("simulate --noise 0 --seed 1 --out " + dir.file("cal.stream")) == 0);
    REQUIRE(run("calibrate --stream " + dir.file("cal.stream") + " --out-bundle " +
                dir.file("cal.bundle")) == 0);

    // Wall at 1 m for 2 s, open depth 1.6 m for 2 s, back to the wall for 2 s.
    io::save_fixation_script(dir.file("step.fix"),
                             {{2.0, Vec3(0.0, 1.6, 1.0)},
                              {2.0, Vec3(0.0, 1.6, 1.6)},
                              {2.0, Vec3(0.0, 1.6, 1.0)}});
    REQUIRE(run("simulate --script " + dir.file("step.fix") + " --noise 0 --seed 2 --out " +
                dir.file("step.stream")) == 0);
    CHECK(run("control --stream " + dir.file("step.stream") + " --bundle " +
              dir.file("cal.bundle") + " --mode sc --w 1.0 --delta 0.3 --out-events " +
              dir.file("events.txt")) == 0);
    const auto events = io::load_events(dir.file("events.txt"));
    REQUIRE(events.size() == 2);
    CHECK(events[0].kind == ControlEventKind::Opened);
    CHECK(events[1].kind == ControlEventKind::Closed);
    CHECK(!events[0].stimulus.has_value()); // sc mode logs zero stimulus records

    // sg mode logs stimulus records on every event.
    CHECK(run("control --stream " + dir.file("step.stream") + " --bundle " +
              dir.file("cal.bundle") + " --mode sg --w 1.0 --delta 0.3 --out-events " +
              dir.file("events_sg.txt")) == 0);
    const auto sg_events = io::load_events(dir.file("events_sg.txt"));
    REQUIRE(sg_events.size() == 2);
    CHECK(sg_events[0].stimulus.has_value());

    // w outside (0.5, 3] is a usage error.
    CHECK(run("control --stream " + dir.file("step.stream") + " --bundle " +
              dir.file("cal.bundle") + " --mode sc --w 4.0 --delta 0.3 --out-events " +
              dir.file("x.txt")) == 2);
}

TEST_CASE("cli: warp identity rig reduces to crop+scale; truncated PPM exits 4") {
    TempDir dir;
    // Frame with a gradient, identity extrinsics.
    RasterImage frame(320, 240, 3);
    for (int y = 0; y < 240; ++y) {
        for (int x = 0; x < 320; ++x) {
            frame.at(x, y, 0) = static_cast<std::uint8_t>(x % 256);
            frame.at(x, y, 1) = static_cast<std::uint8_t>(y % 256);
            frame.at(x, y, 2) = 0;
        }
    }
    io::save_image(dir.file("frame.ppm"), frame);
    io::RigSpec rig;
    rig.camera = PinholeCamera(300.0, 300.0, 160.0, 120.0, 320, 240);
    rig.world_to_cam = RigidTransform{};
    io::save_rig(dir.file("rig.txt"), rig);

    CHECK(run("warp --frame " + dir.file("frame.ppm") + " --rig " + dir.file("rig.txt") +
              " --por 0,0,2 --gaze 0,0,1 --roi-size 0.4x0.3 --out-size 160x120 --out " +
              dir.file("out.ppm")) == 0);
    const RasterImage out = io::load_image(dir.file("out.ppm"));
    CHECK(out.width == 160);
    CHECK(out.height == 120);
    // Identity viewpoint: center of the output equals the projected PoR pixel.
    const int center = out.at(80, 60, 0);
    CHECK(std::abs(center - 160) <= 2);

    std::ofstream(dir.file("trunc.ppm"), std::ios::binary) << "P6\n8 8\n255\nshort";
    CHECK(run("warp --frame " + dir.file("trunc.ppm") + " --rig " + dir.file("rig.txt") +
              " --por 0,0,2 --gaze 0,0,1 --out " + dir.file("x.ppm")) == 4);
}

TEST_CASE("cli: evaluate error tables and session metrics with clean exit codes") {
    TempDir dir;
    // Error-table mode from a hand-written estimates file.
    io::save_estimates(dir.file("est.csv"),
                       {{0.0, 0.9, "losi", 1.0}, {0.1, 1.1, "losi", 1.0}});
    CHECK(run("evaluate --estimates " + dir.file("est.csv") + " --out " +
              dir.file("table.csv")) == 0);
    const std::string table = slurp(dir.file("table.csv"));
    CHECK(table.find("0.5,1,0.1") != std::string::npos);

    // Estimates without any ground truth: exit 2.
    io::save_estimates(dir.file("empty.csv"), {});
    CHECK(run("evaluate --estimates " + dir.file("empty.csv") + " --out " +
              dir.file("x.csv")) == 2);

    // Session-metrics mode with one waiting-state mistake.
    std::vector<ControlEvent> events;
    ControlEvent opened;
    opened.kind = ControlEventKind::Opened;
    opened.t = 2.0;
    opened.gamma = 1.6;
    opened.window_pose = Vec3(0.0, 1.6, 1.6);
    ControlEvent wrong;
    wrong.kind = ControlEventKind::Closed;
    wrong.t = 4.0;
    events = {opened, wrong};
    io::save_events(dir.file("events.txt"), events);
    SessionScript script;
    script.commands = {{1.0, SessionCommand::SeeThroughWall}};
    io::save_session_script(dir.file("script.txt"), script);
    CHECK(run("evaluate --events " + dir.file("events.txt") + " --script " +
              dir.file("script.txt") + " --out " + dir.file("metrics.csv")) == 0);
    const std::string metrics = slurp(dir.file("metrics.csv"));
    CHECK(metrics.find("successes,1") != std::string::npos);
    CHECK(metrics.find("mistakes,1") != std::string::npos);

    // Time bases that cannot match: exit 2.
    SessionScript late;
    late.commands = {{100.0, SessionCommand::SeeThroughWall}};
    io::save_session_script(dir.file("late.txt"), late);
    CHECK(run("evaluate --events " + dir.file("events.txt") + " --script " +
              dir.file("late.txt") + " --out " + dir.file("x.csv")) == 2);
}

TEST_CASE("cli: estimate and control outputs are byte-deterministic") {
    TempDir dir;
    REQUIRE(run("simulate --noise 0.3 --seed 5 --out " + dir.file("cal.stream")) == 0);
    REQUIRE(run("calibrate --stream " + dir.file("cal.stream") + " --out-bundle " +
                dir.file("cal.bundle")) == 0);
    for (int round = 0; round < 2; ++round) {
        const std::string tag = round == 0 ? "a" : "b";
        REQUIRE(run("estimate --stream " + dir.file("cal.stream") + " --bundle " +
                    dir.file("cal.bundle") + " --method fused --out " +
                    dir.file(tag + ".csv")) == 0);
        REQUIRE(run("control --stream " + dir.file("cal.stream") + " --bundle " +
                    dir.file("cal.bundle") + " --mode sc --w 1.0 --delta 0.3 --out-events " +
                    dir.file(tag + ".events")) == 0);
    }
    CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
    CHECK(slurp(dir.file("a.events")) == slurp(dir.file("b.events")));
}
