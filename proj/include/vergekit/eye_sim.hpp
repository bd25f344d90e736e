#pragma once

#include <optional>
#include <random>
#include <vector>

#include "vergekit/geometry.hpp"

namespace vergekit {

/// Kappa rotation mapping the optical axis onto the visual axis.
/// Positive horizontal deflects toward +x, positive vertical toward +y.
Mat3 kappa_rotation(double horizontal, double vertical);

struct EyeCameraRig {
    PinholeCamera camera;
    RigidTransform head_to_cam;
};

/// Eyeball centers and radius shared by the simulator and the fitting code.
struct RigGeometry {
    Vec3 eye_center_left{-0.035, 0.0, 0.0};
    Vec3 eye_center_right{0.035, 0.0, 0.0};
    double eyeball_radius{0.01039};

    Vec3 eye_mid() const { return 0.5 * (eye_center_left + eye_center_right); }
};

/// Synthetic binocular subject serving as the ground-truth oracle.
/// Defaults: 70 mm interocular distance, 10.39 mm eyeball radius; each
/// 320x240 eye camera sits 30 mm below / 25 mm in front of its eyeball
/// center and looks at the resting pupil, with image x aligned to head +x.
struct SubjectModel {
    Vec3 eyeball_center_left{-0.035, 0.0, 0.0};
    Vec3 eyeball_center_right{0.035, 0.0, 0.0};
    double eyeball_radius{0.01039};
    Vec2 kappa_left{Vec2::Zero()};  // (horizontal, vertical), radians
    Vec2 kappa_right{Vec2::Zero()};
    EyeCameraRig eye_cam_left;
    EyeCameraRig eye_cam_right;

    static SubjectModel default_subject(double head_height = 1.6,
                                        double kappa_magnitude = deg2rad(5.0));

    RigGeometry geometry() const {
        return RigGeometry{eyeball_center_left, eyeball_center_right, eyeball_radius};
    }
    Vec3 eye_mid() const { return 0.5 * (eyeball_center_left + eyeball_center_right); }
};

/// Camera rig looking at `target` from `position`, image x axis aligned with
/// head +x (projected), image y pointing down.
RigidTransform look_at_camera_pose(const Vec3& position, const Vec3& target);

struct CalibrationSceneConfig {
    std::vector<double> depths{0.5, 1.5, 2.5, 3.5, 4.5, 5.5};
    double lateral_angle{deg2rad(12.5)};
    double target_visual_angle{deg2rad(2.0)};
    double dwell_seconds{2.0};
    double record_seconds{1.0};
    double sample_rate{30.0};

    void validate() const;
};

/// One timestamped binocular observation.
struct PupilSamplePair {
    double timestamp{0.0};
    Vec3 p_left{Vec3::Zero()};  // 3D pupil centers, rig frame, meters
    Vec3 p_right{Vec3::Zero()};
    Vec2 px_left{Vec2::Zero()}; // pupil pixel coordinates in each eye image
    Vec2 px_right{Vec2::Zero()};
};

struct StreamSample {
    PupilSamplePair pair;
    std::optional<Vec3> truth_fixation;
    std::optional<double> truth_depth;
};

struct GazeStream {
    std::vector<StreamSample> samples;
};

/// Per depth: one central target on the z axis plus two peripheral targets
/// whose x-z direction makes `lateral_angle` with the z axis; y = head_height.
std::vector<Vec3> generate_calibration_targets(const CalibrationSceneConfig& cfg,
                                               double head_height);

/// Noise-free variant; deterministic.
PupilSamplePair simulate_fixation(const SubjectModel& subject, const Vec3& fixation);

/// Applies zero-mean angular noise of std `noise_sigma` (radians) to each
/// optical axis, as a rotation about a random axis perpendicular to it.
PupilSamplePair simulate_fixation(const SubjectModel& subject, const Vec3& fixation,
                                  double noise_sigma, std::mt19937_64& rng);

struct ScriptedFixation {
    double duration;
    Vec3 point;
};

GazeStream simulate_stream(const SubjectModel& subject,
                           const std::vector<ScriptedFixation>& script, double rate,
                           double noise_sigma, std::uint64_t seed);

/// Calibration-scene stream: per target, samples are emitted only during the
/// final `record_seconds` of each `dwell_seconds` slot.
GazeStream simulate_calibration_stream(const SubjectModel& subject,
                                       const CalibrationSceneConfig& cfg, double head_height,
                                       double noise_sigma, std::uint64_t seed);

} // namespace vergekit
