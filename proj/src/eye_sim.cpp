#include "vergekit/eye_sim.hpp"

#include <cmath>

namespace vergekit {

Mat3 kappa_rotation(double horizontal, double vertical) {
    return rot_y(horizontal) * rot_x(-vertical);
}

RigidTransform look_at_camera_pose(const Vec3& position, const Vec3& target) {
    const Vec3 z_cam = (target - position).normalized();
    Vec3 x_cam = z_cam.cross(Vec3::UnitY());
    if (x_cam.norm() < 1e-9) throw ConfigError("look_at_camera_pose: view axis is vertical");
    x_cam.normalize();
    if (x_cam.x() < 0.0) x_cam = -x_cam; // keep image x aligned with head +x
    const Vec3 y_cam = z_cam.cross(x_cam);
    Mat3 r; // rows are the camera axes: p_cam = R * (p - position)
    r.row(0) = x_cam;
    r.row(1) = y_cam;
    r.row(2) = z_cam;
    return RigidTransform(r, -(r * position));
}

SubjectModel SubjectModel::default_subject(double head_height, double kappa_magnitude) {
    SubjectModel s;
    s.eyeball_center_left = Vec3(-0.035, head_height, 0.0);
    s.eyeball_center_right = Vec3(0.035, head_height, 0.0);
    s.eyeball_radius = 0.01039;
    s.kappa_left = Vec2(kappa_magnitude, 0.0);
    s.kappa_right = Vec2(-kappa_magnitude, 0.0);

    const PinholeCamera eye_cam(450.0, 450.0, 160.0, 120.0, 320, 240);
    const Vec3 cam_offset(0.0, -0.030, 0.025);
    const Vec3 pupil_offset(0.0, 0.0, s.eyeball_radius);
    s.eye_cam_left = EyeCameraRig{
        eye_cam, look_at_camera_pose(s.eyeball_center_left + cam_offset,
                                     s.eyeball_center_left + pupil_offset)};
    s.eye_cam_right = EyeCameraRig{
        eye_cam, look_at_camera_pose(s.eyeball_center_right + cam_offset,
                                     s.eyeball_center_right + pupil_offset)};
    return s;
}

void CalibrationSceneConfig::validate() const {
    if (depths.empty()) throw ConfigError("scene: depth list is empty");
    double prev = 0.0;
    for (double d : depths) {
        if (!(d > prev)) throw ConfigError("scene: depths must be strictly increasing and > 0");
        prev = d;
    }
    if (!(record_seconds > 0.0 && record_seconds <= dwell_seconds)) {
        throw ConfigError("scene: need 0 < record_seconds <= dwell_seconds");
    }
    if (!(sample_rate > 0.0)) throw ConfigError("scene: sample_rate must be > 0");
}

std::vector<Vec3> generate_calibration_targets(const CalibrationSceneConfig& cfg,
                                               double head_height) {
    cfg.validate();
    std::vector<Vec3> targets;
    targets.reserve(cfg.depths.size() * 3);
    const double tan_lat = std::tan(cfg.lateral_angle);
    for (double z : cfg.depths) {
        targets.emplace_back(0.0, head_height, z);
        targets.emplace_back(-z * tan_lat, head_height, z);
        targets.emplace_back(z * tan_lat, head_height, z);
    }
    return targets;
}

namespace {

Vec3 perturb_direction(const Vec3& dir, double sigma, std::mt19937_64& rng) {
    if (sigma <= 0.0) return dir;
    // Random axis perpendicular to dir, rotation angle ~ N(0, sigma).
    std::uniform_real_distribution<double> uni(0.0, 2.0 * 3.14159265358979323846);
    std::normal_distribution<double> gauss(0.0, sigma);
    Vec3 ref = std::abs(dir.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    const Vec3 e1 = dir.cross(ref).normalized();
    const Vec3 e2 = dir.cross(e1).normalized();
    const double phi = uni(rng);
    const Vec3 axis = std::cos(phi) * e1 + std::sin(phi) * e2;
    return rotation_from_axis_angle(axis * gauss(rng)) * dir;
}

struct EyeObservation {
    Vec3 pupil;
    Vec2 pixel;
};

EyeObservation simulate_eye(const Vec3& center, double radius, const Vec2& kappa,
                            const EyeCameraRig& rig, const Vec3& fixation, double sigma,
                            std::mt19937_64* rng) {
    const Vec3 to_target = fixation - center;
    if (to_target.z() <= 0.0) {
        throw FixationBehindEyes("simulate_fixation: fixation has non-positive depth");
    }
    const Vec3 visual = to_target.normalized();
    // Kappa maps optical -> visual, so the simulator applies the inverse.
    Vec3 optical = kappa_rotation(kappa.x(), kappa.y()).transpose() * visual;
    if (rng != nullptr) optical = perturb_direction(optical, sigma, *rng);
    const Vec3 pupil = center + radius * optical;
    return EyeObservation{pupil, project_point(rig.camera, rig.head_to_cam, pupil)};
}

} // namespace

PupilSamplePair simulate_fixation(const SubjectModel& subject, const Vec3& fixation) {
    std::mt19937_64 unused(0);
    return simulate_fixation(subject, fixation, 0.0, unused);
}

PupilSamplePair simulate_fixation(const SubjectModel& subject, const Vec3& fixation,
                                  double noise_sigma, std::mt19937_64& rng) {
    const auto left = simulate_eye(subject.eyeball_center_left, subject.eyeball_radius,
                                   subject.kappa_left, subject.eye_cam_left, fixation,
                                   noise_sigma, noise_sigma > 0.0 ? &rng : nullptr);
    const auto right = simulate_eye(subject.eyeball_center_right, subject.eyeball_radius,
                                    subject.kappa_right, subject.eye_cam_right, fixation,
                                    noise_sigma, noise_sigma > 0.0 ? &rng : nullptr);
    PupilSamplePair pair;
    pair.p_left = left.pupil;
    pair.p_right = right.pupil;
    pair.px_left = left.pixel;
    pair.px_right = right.pixel;
    return pair;
}

GazeStream simulate_stream(const SubjectModel& subject,
                           const std::vector<ScriptedFixation>& script, double rate,
                           double noise_sigma, std::uint64_t seed) {
    if (!(rate > 0.0)) throw ConfigError("simulate_stream: rate must be > 0");
    for (const auto& f : script) {
        if (!(f.duration > 0.0)) throw ConfigError("simulate_stream: durations must be > 0");
    }
    std::mt19937_64 rng(seed);
    GazeStream out;
    const double dt = 1.0 / rate;
    double segment_start = 0.0;
    std::size_t k = 0; // global sample index keeps timestamps exact multiples of dt
    for (const auto& f : script) {
        const double segment_end = segment_start + f.duration;
        const Vec3 mid = subject.eye_mid();
        while (k * dt < segment_end - 1e-12) {
            StreamSample s;
            s.pair = simulate_fixation(subject, f.point, noise_sigma, rng);
            s.pair.timestamp = k * dt;
            s.truth_fixation = f.point;
            s.truth_depth = (f.point - mid).norm();
            out.samples.push_back(std::move(s));
            ++k;
        }
        segment_start = segment_end;
    }
    return out;
}

GazeStream simulate_calibration_stream(const SubjectModel& subject,
                                       const CalibrationSceneConfig& cfg, double head_height,
                                       double noise_sigma, std::uint64_t seed) {
    cfg.validate();
    const auto targets = generate_calibration_targets(cfg, head_height);
    std::mt19937_64 rng(seed);
    GazeStream out;
    const double dt = 1.0 / cfg.sample_rate;
    const Vec3 mid = subject.eye_mid();
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double slot_start = static_cast<double>(i) * cfg.dwell_seconds;
        const double record_start = slot_start + (cfg.dwell_seconds - cfg.record_seconds);
        const double slot_end = slot_start + cfg.dwell_seconds;
        std::size_t k = static_cast<std::size_t>(std::ceil(record_start / dt - 1e-12));
        for (; k * dt < slot_end - 1e-12; ++k) {
            StreamSample s;
            s.pair = simulate_fixation(subject, targets[i], noise_sigma, rng);
            s.pair.timestamp = k * dt;
            s.truth_fixation = targets[i];
            s.truth_depth = (targets[i] - mid).norm();
            out.samples.push_back(std::move(s));
        }
    }
    return out;
}

} // namespace vergekit
