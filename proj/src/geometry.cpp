#include "vergekit/geometry.hpp"

#include <cmath>

namespace vergekit {

Ray::Ray(const Vec3& o, const Vec3& d) : origin(o) {
    const double n = d.norm();
    if (!(n > kParallelTol) || !d.allFinite()) {
        throw ConfigError("Ray direction must be nonzero and finite");
    }
    direction = d / n;
}

RigidTransform::RigidTransform(const Mat3& r, const Vec3& t) : rotation(r), translation(t) {
    const Mat3 rtr = r.transpose() * r;
    if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > kOrthonormalTol) {
        throw ConfigError("RigidTransform rotation is not orthonormal");
    }
    if (std::abs(r.determinant() - 1.0) > kOrthonormalTol) {
        throw ConfigError("RigidTransform rotation is not proper (det != +1)");
    }
}

RigidTransform RigidTransform::inverse() const {
    RigidTransform out;
    out.rotation = rotation.transpose();
    out.translation = -(rotation.transpose() * translation);
    return out;
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
    RigidTransform out;
    out.rotation = rotation * other.rotation;
    out.translation = rotation * other.translation + translation;
    return out;
}

PinholeCamera::PinholeCamera(double fx_, double fy_, double cx_, double cy_, int w, int h)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(w), height(h) {
    if (!(fx > 0.0) || !(fy > 0.0)) throw ConfigError("PinholeCamera focal lengths must be > 0");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
        throw ConfigError("PinholeCamera principal point must lie inside the image");
    }
}

Plane::Plane(const Vec3& n, double off) {
    const double len = n.norm();
    if (!(len > kParallelTol)) throw ConfigError("Plane normal must be nonzero");
    // Rescale n.p = off so the stored normal is unit-length.
    normal = n / len;
    offset = off / len;
}

RayClosestPoint closest_point_between_rays(const Ray& a, const Ray& b) {
    // Lines p(s) = o1 + s*d1, q(t) = o2 + t*d2 with unit directions.
    // Normal equations:  s - c*t = -(r.d1),  c*s - t = -(r.d2),  c = d1.d2, r = o1-o2.
    const Vec3 r = a.origin - b.origin;
    const double c = a.direction.dot(b.direction);
    const double det = c * c - 1.0; // determinant of [[1,-c],[c,-1]]
    if (std::abs(det) < kParallelTol) {
        throw DegenerateRays("closest_point_between_rays: parallel lines");
    }
    const double rd1 = r.dot(a.direction);
    const double rd2 = r.dot(b.direction);
    // Cramer's rule on the 2x2 system.
    const double s = (rd1 - c * rd2) / det;
    const double t = (c * rd1 - rd2) / det;
    const Vec3 p = a.at(s);
    const Vec3 q = b.at(t);
    return RayClosestPoint{0.5 * (p + q), (p - q).norm(), s, t};
}

Vec2 project_point(const PinholeCamera& cam, const RigidTransform& world_to_cam, const Vec3& p) {
    const Vec3 pc = world_to_cam.apply(p);
    if (pc.z() <= 1e-9) throw BehindCamera("project_point: point has non-positive depth");
    return Vec2(cam.fx * pc.x() / pc.z() + cam.cx, cam.fy * pc.y() / pc.z() + cam.cy);
}

Vec3 back_project(const PinholeCamera& cam, const RigidTransform& world_to_cam, const Vec2& px,
                  double depth) {
    const Vec3 pc((px.x() - cam.cx) / cam.fx * depth, (px.y() - cam.cy) / cam.fy * depth, depth);
    return world_to_cam.inverse().apply(pc);
}

Vec3 reflect_point(const Plane& m, const Vec3& p) {
    return p - 2.0 * m.signed_distance(p) * m.normal;
}

Vec3 ray_plane_intersection(const Ray& r, const Plane& pl) {
    const double denom = r.direction.dot(pl.normal);
    if (std::abs(denom) <= kParallelTol) {
        throw ParallelRay("ray_plane_intersection: ray parallel to plane");
    }
    const double t = (pl.offset - pl.normal.dot(r.origin)) / denom;
    if (t < 0.0) throw BehindOrigin("ray_plane_intersection: intersection behind ray origin");
    return r.at(t);
}

Mat3 rot_y(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 r;
    r << c, 0, s, 0, 1, 0, -s, 0, c;
    return r;
}

Mat3 rot_x(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 r;
    r << 1, 0, 0, 0, c, -s, 0, s, c;
    return r;
}

Mat3 rotation_from_axis_angle(const Vec3& w) {
    const double theta = w.norm();
    if (theta < 1e-14) return Mat3::Identity();
    const Vec3 k = w / theta;
    Mat3 kx;
    kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
    return Mat3::Identity() + std::sin(theta) * kx + (1.0 - std::cos(theta)) * (kx * kx);
}

double rotation_angle(const Mat3& r) {
    const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c);
}

} // namespace vergekit
