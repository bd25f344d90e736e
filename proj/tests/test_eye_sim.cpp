#include <doctest.h>

#include <cmath>

#include "vergekit/eye_sim.hpp"

using namespace vergekit;

TEST_CASE("generate_calibration_targets: default scene has 18 targets") {
    const CalibrationSceneConfig cfg;
    const auto targets = generate_calibration_targets(cfg, 1.6);
    CHECK(targets.size() == 18);
    for (const auto& t : targets) CHECK(t.y() == doctest::Approx(1.6));
}

TEST_CASE("generate_calibration_targets: peripheral x from hand trigonometry") {
    CalibrationSceneConfig cfg;
    cfg.depths = {2.0};
    const auto targets = generate_calibration_targets(cfg, 0.0);
    REQUIRE(targets.size() == 3);
    const double expect = 2.0 * std::tan(deg2rad(12.5)); // ~0.4434
    CHECK(targets[0].x() == doctest::Approx(0.0));
    CHECK(targets[1].x() == doctest::Approx(-expect).epsilon(1e-12));
    CHECK(targets[2].x() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(0.4434).epsilon(1e-3));
}

TEST_CASE("generate_calibration_targets: zero lateral angle stacks targets on the axis") {
    CalibrationSceneConfig cfg;
    cfg.depths = {1.0};
    cfg.lateral_angle = 0.0;
    const auto targets = generate_calibration_targets(cfg, 0.5);
    REQUIRE(targets.size() == 3);
    for (const auto& t : targets) {
        CHECK(t.x() == doctest::Approx(0.0));
        CHECK(t.z() == doctest::Approx(1.0));
    }
}

TEST_CASE("simulate_fixation: midline fixation gives mirror-symmetric pupil pixels") {
    SubjectModel subject = SubjectModel::default_subject(1.6, 0.0);
    const auto pair = simulate_fixation(subject, Vec3(0.0, 1.6, 2.0));
    const double cx = subject.eye_cam_left.camera.cx;
    CHECK(pair.px_left.x() - cx == doctest::Approx(-(pair.px_right.x() - cx)).epsilon(1e-9));
    CHECK(pair.px_left.y() == doctest::Approx(pair.px_right.y()).epsilon(1e-9));
}

TEST_CASE("simulate_fixation: MIPD grows with fixation depth") {
    SubjectModel subject = SubjectModel::default_subject(1.6, 0.0);
    const auto near = simulate_fixation(subject, Vec3(0.0, 1.6, 0.5));
    const auto far = simulate_fixation(subject, Vec3(0.0, 1.6, 5.5));
    CHECK((near.p_left - near.p_right).norm() < (far.p_left - far.p_right).norm());
}

TEST_CASE("simulate_fixation: rejects fixations behind the eyes") {
    SubjectModel subject = SubjectModel::default_subject();
    CHECK_THROWS_AS(simulate_fixation(subject, Vec3(0.0, 1.6, -1.0)), FixationBehindEyes);
}

TEST_CASE("simulate_fixation: MIPD strictly increasing in depth, bounded by the interocular") {
    SubjectModel subject = SubjectModel::default_subject(0.0, 0.0);
    double prev = 0.0;
    for (double depth = 0.5; depth <= 20.0; depth += 0.5) {
        const auto pair = simulate_fixation(subject, Vec3(0.0, 0.0, depth));
        const double mipd = (pair.p_left - pair.p_right).norm();
        CHECK(mipd > prev);
        CHECK(mipd < 0.070);
        prev = mipd;
    }
    CHECK(prev > 0.069); // asymptotically approaches 70 mm
}

TEST_CASE("simulate_stream: sample counts and strict timestamps") {
    SubjectModel subject = SubjectModel::default_subject();
    const Vec3 p(0.0, 1.6, 2.0);

    const auto one = simulate_stream(subject, {{1.0, p}}, 30.0, 0.0, 0);
    CHECK(one.samples.size() == 30);

    const auto two = simulate_stream(subject, {{0.5, p}, {0.5, Vec3(0.0, 1.6, 1.0)}}, 30.0, 0.0, 0);
    CHECK(two.samples.size() == 30);
    for (std::size_t i = 1; i < two.samples.size(); ++i) {
        CHECK(two.samples[i].pair.timestamp > two.samples[i - 1].pair.timestamp);
    }
}

TEST_CASE("simulate_stream: noiseless streams are constant per fixation") {
    SubjectModel subject = SubjectModel::default_subject();
    const auto s = simulate_stream(subject, {{0.5, Vec3(0.1, 1.6, 1.5)}}, 30.0, 0.0, 42);
    REQUIRE(!s.samples.empty());
    for (const auto& sample : s.samples) {
        CHECK((sample.pair.p_left - s.samples[0].pair.p_left).norm() == 0.0);
        CHECK((sample.pair.px_right - s.samples[0].pair.px_right).norm() == 0.0);
    }
}

TEST_CASE("simulate_stream: seeded noise is reproducible and unseeded draws differ") {
    SubjectModel subject = SubjectModel::default_subject();
    const std::vector<ScriptedFixation> script = {{0.5, Vec3(0.0, 1.6, 2.0)}};
    const auto a = simulate_stream(subject, script, 30.0, deg2rad(0.5), 9);
    const auto b = simulate_stream(subject, script, 30.0, deg2rad(0.5), 9);
    const auto c = simulate_stream(subject, script, 30.0, deg2rad(0.5), 10);
    REQUIRE(a.samples.size() == b.samples.size());
    bool all_equal_ab = true, any_diff_ac = false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        all_equal_ab &= (a.samples[i].pair.p_left - b.samples[i].pair.p_left).norm() == 0.0;
        any_diff_ac |= (a.samples[i].pair.p_left - c.samples[i].pair.p_left).norm() > 0.0;
    }
    CHECK(all_equal_ab);
    CHECK(any_diff_ac);
}

TEST_CASE("simulate_calibration_stream: records only the tail of each dwell slot") {
    SubjectModel subject = SubjectModel::default_subject();
    CalibrationSceneConfig cfg; // 18 targets, dwell 2 s, record last 1 s, 30 Hz
    const auto stream = simulate_calibration_stream(subject, cfg, 1.6, 0.0, 0);
    CHECK(stream.samples.size() == 18 * 30);
    // First dwell slot is [0, 2): recording starts at t = 1.
    CHECK(stream.samples[0].pair.timestamp == doctest::Approx(1.0));
    REQUIRE(stream.samples[0].truth_fixation.has_value());
    CHECK(stream.samples[0].truth_depth.has_value());
}
