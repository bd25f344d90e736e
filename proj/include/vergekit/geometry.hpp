#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "vergekit/errors.hpp"

namespace vergekit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kParallelTol = 1e-12;
inline constexpr double kOrthonormalTol = 1e-9;

constexpr double deg2rad(double deg) { return deg * (3.14159265358979323846 / 180.0); }
constexpr double rad2deg(double rad) { return rad * (180.0 / 3.14159265358979323846); }

/// Half line with unit direction. Directions are normalized at construction.
struct Ray {
    Vec3 origin{Vec3::Zero()};
    Vec3 direction{Vec3::UnitZ()};

    Ray() = default;
    Ray(const Vec3& o, const Vec3& d);

    Vec3 at(double t) const { return origin + t * direction; }
};

/// Proper rigid motion p -> R*p + t. The constructor rejects improper or
/// non-orthonormal rotations (tolerance 1e-9).
struct RigidTransform {
    Mat3 rotation{Mat3::Identity()};
    Vec3 translation{Vec3::Zero()};

    RigidTransform() = default;
    RigidTransform(const Mat3& r, const Vec3& t);

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    Vec3 rotate(const Vec3& v) const { return rotation * v; }
    RigidTransform inverse() const;
    /// Composition: (*this) after other, i.e. result.apply(p) == apply(other.apply(p)).
    RigidTransform compose(const RigidTransform& other) const;
};

struct PinholeCamera {
    double fx{1.0}, fy{1.0};
    double cx{0.0}, cy{0.0};
    int width{0}, height{0};

    PinholeCamera() = default;
    PinholeCamera(double fx, double fy, double cx, double cy, int width, int height);
};

/// Plane n.p = offset with unit normal.
struct Plane {
    Vec3 normal{Vec3::UnitZ()};
    double offset{0.0};

    Plane() = default;
    Plane(const Vec3& n, double off);

    double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

struct RayClosestPoint {
    Vec3 midpoint;
    double gap; // minimal line-to-line distance, meters
    double s;   // line parameter on ray a
    double t;   // line parameter on ray b
};

/// Point minimizing the sum of squared distances to both (infinite) lines,
/// solved via the 2x2 normal equations. Throws DegenerateRays for parallel lines.
RayClosestPoint closest_point_between_rays(const Ray& a, const Ray& b);

/// Pinhole projection of a world point; throws BehindCamera for Z <= 1e-9.
Vec2 project_point(const PinholeCamera& cam, const RigidTransform& world_to_cam, const Vec3& p);

/// Back-projection of pixel (u,v) at a given camera-frame depth, into world coordinates.
Vec3 back_project(const PinholeCamera& cam, const RigidTransform& world_to_cam, const Vec2& px,
                  double depth);

/// Mirror reflection p - 2*(n.p - offset)*n. An involution.
Vec3 reflect_point(const Plane& m, const Vec3& p);

/// Intersection of a ray with a plane. Throws ParallelRay / BehindOrigin.
Vec3 ray_plane_intersection(const Ray& r, const Plane& pl);

/// Rotation about +y by `angle` (x-z deflection).
Mat3 rot_y(double angle);
/// Rotation about +x by `angle`.
Mat3 rot_x(double angle);
/// Rodrigues rotation from an axis-angle vector.
Mat3 rotation_from_axis_angle(const Vec3& w);
/// Angle of a rotation matrix, radians in [0, pi].
double rotation_angle(const Mat3& r);

} // namespace vergekit
