#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vergekit/geometry.hpp"

namespace vergekit {

struct Correspondence {
    Vec3 world;  // HoloLens frame H, meters
    Vec2 pixel;  // camera image C
};

struct PnpResult {
    RigidTransform pose; // H -> C
    double rms_px{0.0};
};

/// Camera pose from 3D-2D correspondences: DLT initialization refined by
/// Levenberg-Marquardt on the reprojection error. Needs >= 6 correspondences
/// in non-degenerate (non-coplanar) configuration.
PnpResult register_camera(const std::vector<Correspondence>& corrs, const PinholeCamera& cam);

struct RoiSpec {
    Vec3 center; // the 3D point of regard
    Ray gaze;
    double width{0.6};   // meters
    double height{0.45}; // meters
};

/// Corners of the gaze-perpendicular ROI rectangle, ordered top-left,
/// top-right, bottom-right, bottom-left as seen by the viewer looking along
/// the gaze with world-up +y.
std::array<Vec3, 4> roi_corners(const RoiSpec& spec);

struct QuadProjection {
    std::array<Vec2, 4> quad;
    bool out_of_frame{false}; // some corner left the image (not fatal)
};

QuadProjection roi_to_camera_quad(const std::array<Vec3, 4>& corners, const RigidTransform& t,
                                  const PinholeCamera& cam);

/// 3x3 projective map, normalized so the bottom-right element is 1 when nonzero.
struct Homography {
    Mat3 m{Mat3::Identity()};

    Vec2 apply(const Vec2& p) const;
    Homography inverse() const;
};

/// Exact four-point homography by direct linear transformation.
Homography homography_from_quad(const std::array<Vec2, 4>& src, const std::array<Vec2, 4>& dst);

/// Row-major 8-bit raster, 1 or 3 channels.
struct RasterImage {
    int width{0}, height{0};
    int channels{1};
    std::vector<std::uint8_t> data;

    RasterImage() = default;
    RasterImage(int w, int h, int c, std::uint8_t fill = 0);

    std::uint8_t& at(int x, int y, int c) {
        return data[static_cast<std::size_t>((y * width + x) * channels + c)];
    }
    std::uint8_t at(int x, int y, int c) const {
        return data[static_cast<std::size_t>((y * width + x) * channels + c)];
    }
};

/// Backward warp: every output pixel is inverse-mapped through h and
/// bilinearly sampled; source samples outside the image produce black.
RasterImage warp_image(const RasterImage& src, const Homography& h, int out_width,
                       int out_height);

struct SeeThroughResult {
    RasterImage image;
    bool out_of_frame{false};
};

/// Full hidden-scene pipeline: ROI rectangle around the point of regard,
/// projected into the hidden camera via T, then warped into the user's view.
SeeThroughResult see_through_frame(const Vec3& por, const Ray& gaze, double roi_width,
                                   double roi_height, const RigidTransform& t,
                                   const PinholeCamera& cam, const RasterImage& frame,
                                   int out_width, int out_height);

} // namespace vergekit
