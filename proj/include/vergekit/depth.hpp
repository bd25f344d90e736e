#pragma once

#include <optional>

#include "vergekit/calibration.hpp"
#include "vergekit/eye_sim.hpp"
#include "vergekit/geometry.hpp"

namespace vergekit {

enum class DepthMethod { LosI, MIPD, PIPD, Fused };

const char* to_string(DepthMethod m);

struct GazeRayPair {
    Ray left, right;
    Vec3 eye_center_mid;

    /// Horizontal angle of the cyclopean (mid-eye) gaze direction, radians
    /// from the +z axis in the x-z plane.
    double horizontal_angle() const;
};

struct DepthEstimate {
    double depth{0.0}; // meters
    DepthMethod method{DepthMethod::LosI};
    std::optional<Vec3> por;
    double horizontal_angle{0.0};
    /// For Fused estimates: which estimator produced the depth.
    std::optional<DepthMethod> fused_source;
    /// Set when the fusion rule selected LosI but had to fall back to PIPD.
    bool losi_fallback{false};
};

/// Reconstructs per-eye visual-axis rays from 3D pupil centers.
/// Throws PupilOffSphere when a pupil lies more than 2 mm off its eyeball sphere.
GazeRayPair gaze_rays_from_pupils(const PupilSamplePair& pair, const KappaModel& kappa,
                                  const RigGeometry& rig);

/// 3D line-of-sight intersection depth. Throws DivergentRays when the
/// closest-approach parameters are negative (intersection behind the eyes).
DepthEstimate depth_losi(const GazeRayPair& rays);

/// MIPD in millimeters, with the configured norm.
double ipd_mm(const PupilSamplePair& pair, const IpdOptions& opts = {});

/// PIPD in pixels: theta2 = W - x_left + x_right.
double ipd_px(const PupilSamplePair& pair, const IpdOptions& opts = {});

/// Sectored exponential regression of depth from an IPD value.
DepthEstimate depth_regress(double theta, const SectoredRegression& reg,
                            double horizontal_angle);

/// Piecewise fusion: evaluates the PIPD depth as the gate; returns the LosI
/// depth when the PIPD output lies in (0.5, 2] m, otherwise the PIPD depth.
DepthEstimate depth_fused(const PupilSamplePair& pair, const GazeRayPair& rays,
                          const SectoredRegression& pipd_reg, const IpdOptions& opts = {});

} // namespace vergekit
