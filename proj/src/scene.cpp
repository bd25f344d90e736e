#include "vergekit/scene.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "vergekit/levmar.hpp"

namespace vergekit {

namespace {

// Rank of the world-point scatter: 1 => collinear, 2 => coplanar.
int scatter_rank(const std::vector<Correspondence>& corrs) {
    Vec3 mean = Vec3::Zero();
    for (const auto& c : corrs) mean += c.world;
    mean /= static_cast<double>(corrs.size());
    Mat3 scatter = Mat3::Zero();
    double scale = 0.0;
    for (const auto& c : corrs) {
        const Vec3 d = c.world - mean;
        scatter += d * d.transpose();
        scale = std::max(scale, d.squaredNorm());
    }
    if (scale <= 0.0) return 0;
    Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
    int rank = 0;
    for (int i = 0; i < 3; ++i) {
        if (eig.eigenvalues()[i] > 1e-9 * scale * static_cast<double>(corrs.size())) ++rank;
    }
    return rank;
}

} // namespace

PnpResult register_camera(const std::vector<Correspondence>& corrs, const PinholeCamera& cam) {
    if (corrs.size() < 4) {
        throw InsufficientCorrespondences("register_camera: need at least 6 correspondences");
    }
    if (scatter_rank(corrs) < 3) {
        throw DegenerateConfiguration("register_camera: world points are collinear or coplanar");
    }
    if (corrs.size() < 6) {
        throw InsufficientCorrespondences("register_camera: need at least 6 correspondences");
    }

    const std::size_t n = corrs.size();

    // DLT on normalized image coordinates: rows of A annihilate the 3x4
    // projection matrix stacked as a 12-vector.
    Eigen::MatrixXd a(2 * n, 12);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& w = corrs[i].world;
        const double xn = (corrs[i].pixel.x() - cam.cx) / cam.fx;
        const double yn = (corrs[i].pixel.y() - cam.cy) / cam.fy;
        const Eigen::Index r0 = static_cast<Eigen::Index>(2 * i);
        a.row(r0) << w.x(), w.y(), w.z(), 1, 0, 0, 0, 0, -xn * w.x(), -xn * w.y(), -xn * w.z(),
            -xn;
        a.row(r0 + 1) << 0, 0, 0, 0, w.x(), w.y(), w.z(), 1, -yn * w.x(), -yn * w.y(),
            -yn * w.z(), -yn;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    Eigen::VectorXd h = svd.matrixV().col(11);

    Eigen::Matrix<double, 3, 4> p;
    p.row(0) = h.segment<4>(0);
    p.row(1) = h.segment<4>(4);
    p.row(2) = h.segment<4>(8);
    Mat3 m = p.leftCols<3>();
    if (m.determinant() < 0.0) {
        p = -p;
        m = -m;
    }
    Eigen::JacobiSVD<Mat3> msvd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double scale = msvd.singularValues().mean();
    if (!(scale > 1e-12)) {
        throw DegenerateConfiguration("register_camera: projection matrix is rank deficient");
    }
    Mat3 r = msvd.matrixU() * msvd.matrixV().transpose();
    Vec3 t = p.col(3) / scale;

    // Levenberg-Marquardt refinement over (axis-angle delta, translation).
    const Mat3 r0 = r;
    const auto eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd& res, Eigen::MatrixXd* jac) {
        const Mat3 rot = r0 * rotation_from_axis_angle(Vec3(x[0], x[1], x[2]));
        const Vec3 tr(x[3], x[4], x[5]);
        res.resize(static_cast<Eigen::Index>(2 * n));
        if (jac != nullptr) jac->resize(static_cast<Eigen::Index>(2 * n), 6);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 pc = rot * corrs[i].world + tr;
            const double z = pc.z();
            const double iz = 1.0 / z;
            const Eigen::Index row = static_cast<Eigen::Index>(2 * i);
            res[row] = cam.fx * pc.x() * iz + cam.cx - corrs[i].pixel.x();
            res[row + 1] = cam.fy * pc.y() * iz + cam.cy - corrs[i].pixel.y();
            if (jac != nullptr) {
                // d(pc)/d(omega) = -rot * [world]_x at the current linearization point,
                // d(pc)/d(t) = I.
                Eigen::Matrix<double, 3, 6> dpc;
                Mat3 wx;
                const Vec3& w = corrs[i].world;
                wx << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
                dpc.leftCols<3>() = -rot * wx;
                dpc.rightCols<3>() = Mat3::Identity();
                Eigen::Matrix<double, 2, 3> dproj;
                dproj << cam.fx * iz, 0, -cam.fx * pc.x() * iz * iz, 0, cam.fy * iz,
                    -cam.fy * pc.y() * iz * iz;
                jac->block<2, 6>(row, 0) = dproj * dpc;
            }
        }
    };

    Eigen::VectorXd x0(6);
    x0 << 0, 0, 0, t.x(), t.y(), t.z();
    LevMarOptions opts;
    opts.max_iterations = 200;
    opts.gradient_tol = 1e-14;
    const LevMarResult lm = lm_solve(x0, eval, opts);
    if (!lm.converged) throw NoConvergence("register_camera: refinement did not converge");

    PnpResult out;
    out.pose = RigidTransform(r0 * rotation_from_axis_angle(
                                  Vec3(lm.params[0], lm.params[1], lm.params[2])),
                              Vec3(lm.params[3], lm.params[4], lm.params[5]));
    out.rms_px = std::sqrt(2.0 * lm.cost_history.back() / static_cast<double>(n));
    return out;
}

std::array<Vec3, 4> roi_corners(const RoiSpec& spec) {
    if (!(spec.width > 0.0 && spec.height > 0.0)) {
        throw ConfigError("roi_corners: width and height must be > 0");
    }
    const Vec3 g = spec.gaze.direction;
    const Vec3 up = Vec3::UnitY();
    const Vec3 cross = up.cross(g);
    if (cross.norm() < std::sin(deg2rad(0.5))) {
        throw GimbalDegenerate("roi_corners: gaze within 0.5 deg of world-up");
    }
    const Vec3 right = cross.normalized(); // horizontal axis, viewer's right
    const Vec3 v_up = g.cross(right).normalized();
    const Vec3 dx = 0.5 * spec.width * right;
    const Vec3 dy = 0.5 * spec.height * v_up;
    return {spec.center - dx + dy, spec.center + dx + dy, spec.center + dx - dy,
            spec.center - dx - dy};
}

QuadProjection roi_to_camera_quad(const std::array<Vec3, 4>& corners, const RigidTransform& t,
                                  const PinholeCamera& cam) {
    QuadProjection out;
    for (std::size_t i = 0; i < 4; ++i) {
        out.quad[i] = project_point(cam, t, corners[i]);
        if (out.quad[i].x() < 0.0 || out.quad[i].x() > cam.width - 1 || out.quad[i].y() < 0.0 ||
            out.quad[i].y() > cam.height - 1) {
            out.out_of_frame = true;
        }
    }
    return out;
}

Vec2 Homography::apply(const Vec2& p) const {
    const Vec3 q = m * Vec3(p.x(), p.y(), 1.0);
    if (std::abs(q.z()) < 1e-15) throw DegenerateQuad("Homography: point maps to infinity");
    return Vec2(q.x() / q.z(), q.y() / q.z());
}

Homography Homography::inverse() const {
    Homography out;
    out.m = m.inverse();
    if (std::abs(out.m(2, 2)) > 1e-15) out.m /= out.m(2, 2);
    return out;
}

namespace {

bool has_collinear_triple(const std::array<Vec2, 4>& q) {
    double scale = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int k = i + 1; k < 4; ++k) scale = std::max(scale, (q[i] - q[k]).squaredNorm());
    }
    for (int i = 0; i < 4; ++i) {
        for (int k = i + 1; k < 4; ++k) {
            for (int l = k + 1; l < 4; ++l) {
                const Vec2 a = q[k] - q[i];
                const Vec2 b = q[l] - q[i];
                if (std::abs(a.x() * b.y() - a.y() * b.x()) < 1e-9 * std::max(scale, 1e-30)) {
                    return true;
                }
            }
        }
    }
    return false;
}

// Hartley normalization: zero mean, sqrt(2) RMS radius.
Mat3 normalizer(const std::array<Vec2, 4>& q) {
    Vec2 mean = Vec2::Zero();
    for (const auto& p : q) mean += p;
    mean /= 4.0;
    double rms = 0.0;
    for (const auto& p : q) rms += (p - mean).squaredNorm();
    rms = std::sqrt(rms / 4.0);
    const double s = rms > 1e-15 ? std::sqrt(2.0) / rms : 1.0;
    Mat3 t;
    t << s, 0, -s * mean.x(), 0, s, -s * mean.y(), 0, 0, 1;
    return t;
}

} // namespace

Homography homography_from_quad(const std::array<Vec2, 4>& src, const std::array<Vec2, 4>& dst) {
    if (has_collinear_triple(src) || has_collinear_triple(dst)) {
        throw DegenerateQuad("homography_from_quad: three points are collinear");
    }
    const Mat3 ts = normalizer(src);
    const Mat3 td = normalizer(dst);

    Eigen::Matrix<double, 8, 9> a;
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec3 s = ts * Vec3(src[i].x(), src[i].y(), 1.0);
        const Vec3 d = td * Vec3(dst[i].x(), dst[i].y(), 1.0);
        const Eigen::Index r0 = static_cast<Eigen::Index>(2 * i);
        a.row(r0) << s.x(), s.y(), 1, 0, 0, 0, -d.x() * s.x(), -d.x() * s.y(), -d.x();
        a.row(r0 + 1) << 0, 0, 0, s.x(), s.y(), 1, -d.y() * s.x(), -d.y() * s.y(), -d.y();
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
    const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
    Mat3 hn;
    hn << h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8];

    Homography out;
    out.m = td.inverse() * hn * ts;
    if (std::abs(out.m.determinant()) < 1e-12) {
        throw DegenerateQuad("homography_from_quad: singular homography");
    }
    if (std::abs(out.m(2, 2)) > 1e-15) out.m /= out.m(2, 2);
    return out;
}

RasterImage::RasterImage(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c) {
    if (w <= 0 || h <= 0 || (c != 1 && c != 3)) {
        throw ConfigError("RasterImage: invalid dimensions or channel count");
    }
    data.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                    static_cast<std::size_t>(c),
                fill);
}

RasterImage warp_image(const RasterImage& src, const Homography& h, int out_width,
                       int out_height) {
    const Homography inv = h.inverse();
    RasterImage out(out_width, out_height, src.channels, 0);
    for (int y = 0; y < out_height; ++y) {
        for (int x = 0; x < out_width; ++x) {
            const Vec3 q = inv.m * Vec3(x, y, 1.0);
            if (std::abs(q.z()) < 1e-15) continue;
            const double sx = q.x() / q.z();
            const double sy = q.y() / q.z();
            if (sx < 0.0 || sy < 0.0 || sx > src.width - 1 || sy > src.height - 1) continue;
            const int x0 = static_cast<int>(sx);
            const int y0 = static_cast<int>(sy);
            const int x1 = std::min(x0 + 1, src.width - 1);
            const int y1 = std::min(y0 + 1, src.height - 1);
            const double fx = sx - x0;
            const double fy = sy - y0;
            for (int c = 0; c < src.channels; ++c) {
                const double v = (1 - fx) * (1 - fy) * src.at(x0, y0, c) +
                                 fx * (1 - fy) * src.at(x1, y0, c) +
                                 (1 - fx) * fy * src.at(x0, y1, c) +
                                 fx * fy * src.at(x1, y1, c);
                out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(v));
            }
        }
    }
    return out;
}

SeeThroughResult see_through_frame(const Vec3& por, const Ray& gaze, double roi_width,
                                   double roi_height, const RigidTransform& t,
                                   const PinholeCamera& cam, const RasterImage& frame,
                                   int out_width, int out_height) {
    const auto corners = roi_corners(RoiSpec{por, gaze, roi_width, roi_height});
    const QuadProjection proj = roi_to_camera_quad(corners, t, cam);
    const std::array<Vec2, 4> dst = {Vec2(0, 0), Vec2(out_width - 1, 0),
                                     Vec2(out_width - 1, out_height - 1),
                                     Vec2(0, out_height - 1)};
    const Homography h = homography_from_quad(proj.quad, dst);
    return SeeThroughResult{warp_image(frame, h, out_width, out_height), proj.out_of_frame};
}

} // namespace vergekit
