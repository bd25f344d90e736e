#include "vergekit/depth.hpp"

#include <cmath>

namespace vergekit {

const char* to_string(DepthMethod m) {
    switch (m) {
        case DepthMethod::LosI: return "losi";
        case DepthMethod::MIPD: return "mipd";
        case DepthMethod::PIPD: return "pipd";
        case DepthMethod::Fused: return "fused";
    }
    return "unknown";
}

double GazeRayPair::horizontal_angle() const {
    const Vec3 d = (left.direction + right.direction).normalized();
    return std::atan2(d.x(), d.z());
}

GazeRayPair gaze_rays_from_pupils(const PupilSamplePair& pair, const KappaModel& kappa,
                                  const RigGeometry& rig) {
    constexpr double kSphereTol = 0.002; // meters
    const auto eye_ray = [&](const Vec3& pupil, const Vec3& center, const Vec2& k) {
        const Vec3 offset = pupil - center;
        if (std::abs(offset.norm() - rig.eyeball_radius) > kSphereTol) {
            throw PupilOffSphere("gaze_rays_from_pupils: pupil center off the eyeball sphere");
        }
        const Vec3 optical = offset.normalized();
        const Vec3 visual = kappa_rotation(k.x(), k.y()) * optical;
        return Ray(center, visual);
    };
    GazeRayPair out{eye_ray(pair.p_left, rig.eye_center_left, kappa.left),
                    eye_ray(pair.p_right, rig.eye_center_right, kappa.right),
                    rig.eye_mid()};
    return out;
}

DepthEstimate depth_losi(const GazeRayPair& rays) {
    const RayClosestPoint cp = closest_point_between_rays(rays.left, rays.right);
    if (cp.s < 0.0 || cp.t < 0.0) {
        throw DivergentRays("depth_losi: gaze rays meet behind the eyes");
    }
    DepthEstimate est;
    est.depth = (cp.midpoint - rays.eye_center_mid).norm();
    est.method = DepthMethod::LosI;
    est.por = cp.midpoint;
    est.horizontal_angle = rays.horizontal_angle();
    return est;
}

double ipd_mm(const PupilSamplePair& pair, const IpdOptions& opts) {
    const Vec3 d = pair.p_left - pair.p_right;
    const double meters =
        opts.mipd_norm == MipdNorm::Euclidean ? d.norm() : d.cwiseAbs().sum();
    return meters * 1000.0;
}

double ipd_px(const PupilSamplePair& pair, const IpdOptions& opts) {
    const double w = opts.image_width;
    const double xl = pair.px_left.x();
    const double xr = pair.px_right.x();
    if (xl < 0.0 || xl > w || xr < 0.0 || xr > w) {
        throw OutOfImage("ipd_px: pupil pixel outside the image width");
    }
    return w - xl + xr;
}

DepthEstimate depth_regress(double theta, const SectoredRegression& reg,
                            double horizontal_angle) {
    if (!reg.fitted()) throw ModelMissing("depth_regress: regression model not fitted");
    const int sector = reg.sector_of(horizontal_angle);
    const RegressionModel& model = reg.models[static_cast<std::size_t>(sector)];
    DepthEstimate est;
    est.depth = model.predict(theta);
    est.method = model.units == IpdUnits::Millimeters ? DepthMethod::MIPD : DepthMethod::PIPD;
    est.horizontal_angle = horizontal_angle;
    return est;
}

DepthEstimate depth_fused(const PupilSamplePair& pair, const GazeRayPair& rays,
                          const SectoredRegression& pipd_reg, const IpdOptions& opts) {
    if (!pipd_reg.fitted()) throw ModelMissing("depth_fused: PIPD regression not fitted");
    if (pipd_reg.models[0].units != IpdUnits::Pixels) {
        throw ModelMissing("depth_fused: fusion gate requires a pixel-units regression");
    }
    const double angle = rays.horizontal_angle();
    DepthEstimate pipd = depth_regress(ipd_px(pair, opts), pipd_reg, angle);
    if (pipd.depth > 0.5 && pipd.depth <= 2.0) {
        try {
            DepthEstimate losi = depth_losi(rays);
            losi.method = DepthMethod::Fused;
            losi.fused_source = DepthMethod::LosI;
            return losi;
        } catch (const NumericError&) {
            pipd.method = DepthMethod::Fused;
            pipd.fused_source = DepthMethod::PIPD;
            pipd.losi_fallback = true;
            return pipd;
        }
    }
    pipd.method = DepthMethod::Fused;
    pipd.fused_source = DepthMethod::PIPD;
    return pipd;
}

} // namespace vergekit
