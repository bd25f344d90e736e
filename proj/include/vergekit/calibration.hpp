#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "vergekit/eye_sim.hpp"
#include "vergekit/geometry.hpp"

namespace vergekit {

/// Per-eye (horizontal, vertical) kappa angles, radians.
struct KappaModel {
    Vec2 left{Vec2::Zero()};
    Vec2 right{Vec2::Zero()};

    void validate() const;
};

struct KappaFitResult {
    KappaModel kappa;
    double residual_rms_rad{0.0};
    std::vector<double> cost_history; // non-increasing across optimizer iterations
};

struct CalibrationSample {
    PupilSamplePair pair;
    Vec3 target;
};

/// Least-squares kappa from calibration samples with known targets.
/// Requires >= 4 samples spanning >= 2 distinct depths.
KappaFitResult fit_kappa(const std::vector<CalibrationSample>& samples, const RigGeometry& rig);

enum class IpdUnits { Millimeters, Pixels };

/// How the millimeter IPD is measured. The physical quantity is a distance,
/// so Euclidean is the default; L1 is the literal norm from the formula.
enum class MipdNorm { Euclidean, L1 };

struct IpdOptions {
    MipdNorm mipd_norm{MipdNorm::Euclidean};
    double image_width{320.0};
};

/// d_hat = k1 * exp(k2 * (theta - theta_bar)) + k3, theta in mm or px, depth in meters.
struct RegressionModel {
    double k1{std::nan("")}, k2{std::nan("")}, k3{std::nan("")};
    double theta_bar{std::nan("")};
    IpdUnits units{IpdUnits::Millimeters};

    bool fitted() const {
        return std::isfinite(k1) && std::isfinite(k2) && std::isfinite(k3) &&
               std::isfinite(theta_bar);
    }
    double predict(double theta) const { return k1 * std::exp(k2 * (theta - theta_bar)) + k3; }
};

struct RansacConfig {
    int iterations{200};
    int min_samples{3};
    double inlier_threshold{0.5}; // meters of depth residual
    double min_inlier_fraction{0.5};
    std::uint64_t seed{0};

    void validate() const;
};

struct ExponentialFitResult {
    RegressionModel model;
    std::vector<bool> inlier_mask;
    double rms{0.0}; // depth residual RMS over inliers, meters
};

struct ThetaDepthPair {
    double theta;
    double depth;
};

/// RANSAC-wrapped nonlinear least squares for the exponential depth model.
ExponentialFitResult fit_exponential(const std::vector<ThetaDepthPair>& pairs,
                                     const RansacConfig& ransac,
                                     IpdUnits units = IpdUnits::Millimeters);

/// Three exponential models split by horizontal gaze angle.
struct SectoredRegression {
    std::array<double, 2> boundaries{-deg2rad(6.0), deg2rad(6.0)}; // radians, increasing
    std::array<RegressionModel, 3> models{};

    int sector_of(double horizontal_angle) const {
        if (horizontal_angle < boundaries[0]) return 0;
        if (horizontal_angle < boundaries[1]) return 1;
        return 2;
    }
    bool fitted() const {
        return models[0].fitted() && models[1].fitted() && models[2].fitted();
    }
};

struct SectoredFitResult {
    SectoredRegression regression;
    std::array<double, 3> sector_rms{};
    std::array<int, 3> sector_counts{};
};

/// Partitions samples by the horizontal gaze angle of the target and fits one
/// exponential per sector. Throws SectorUnderpopulated when a sector receives
/// fewer than ransac.min_samples samples.
SectoredFitResult fit_sectored(const std::vector<CalibrationSample>& samples,
                               const std::array<double, 2>& boundaries,
                               const RansacConfig& ransac, const RigGeometry& rig,
                               IpdUnits units, const IpdOptions& opts = {});

struct ThresholdBin {
    double lo, hi; // depth range (lo, hi], meters
    double delta;  // activation margin, meters
};

struct ThresholdTable {
    std::vector<ThresholdBin> bins;

    /// Piecewise-constant lookup; throws ConfigError when w is outside the table.
    double delta_at(double distance) const;
};

struct BinErrorStat {
    double lo, hi;
    double mean;
    double stddev;
};

/// delta(bin) = mean + std per bin.
ThresholdTable build_threshold_table(const std::vector<BinErrorStat>& stats);

struct ChessboardLayout {
    int rows{6}; // inner corner grid
    int cols{9};
    double square{0.025}; // meters

    std::vector<Vec3> corners() const; // local frame, z = 0 plane
};

/// Mirror-based rig calibration observation (poses given as fitted chessboard
/// poses; the corner sets are regenerated from the layout).
struct RigObservation {
    RigidTransform pose_E_virtual_in_S; // mirrored image E' of chessboard E, in scene camera S
    RigidTransform pose_F_in_S;         // mirror chessboard F in S; its z=0 plane is the mirror
    RigidTransform pose_G_in_N;         // chessboard G in eye camera N
    ChessboardLayout layout;
    RigidTransform g_in_e; // known coplanar layout: maps G-local points into E-local
};

struct MirrorCalibrationResult {
    RigidTransform scene_from_eye; // maps eye-camera frame N into scene-camera frame S
    Plane mirror_plane;
    double corner_rms{0.0}; // consistency residual of the reflected-corner refit
};

MirrorCalibrationResult calibrate_rig_with_mirror(const RigObservation& obs);

/// Everything the estimators need at prediction time. Sections may be absent
/// when a bundle file carries only part of a calibration.
struct CalibrationBundle {
    std::optional<KappaModel> kappa;
    double kappa_residual_rad{0.0};
    std::optional<SectoredRegression> mipd;
    std::optional<SectoredRegression> pipd;
    std::optional<ThresholdTable> thresholds;
};

/// Rigid fit src -> dst (Kabsch), always returning a proper rotation.
RigidTransform fit_rigid_transform(const std::vector<Vec3>& src, const std::vector<Vec3>& dst,
                                   double* rms = nullptr);

} // namespace vergekit
