#include "vergekit/calibration.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "vergekit/depth.hpp"
#include "vergekit/levmar.hpp"

namespace vergekit {

void KappaModel::validate() const {
    constexpr double kBound = 0.35; // ~20 deg physiological bound
    for (double a : {left.x(), left.y(), right.x(), right.y()}) {
        if (!(std::abs(a) < kBound)) {
            throw ConfigError("KappaModel: angle exceeds the physiological bound");
        }
    }
}

void RansacConfig::validate() const {
    if (iterations < 0) throw ConfigError("RansacConfig: iterations must be >= 0");
    if (min_samples < 3) throw ConfigError("RansacConfig: min_samples must be >= 3");
    if (!(min_inlier_fraction > 0.0 && min_inlier_fraction <= 1.0)) {
        throw ConfigError("RansacConfig: min_inlier_fraction must be in (0, 1]");
    }
}

namespace {

Mat3 drot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 m;
    m << -s, 0, c, 0, 0, 0, -c, 0, -s;
    return m;
}

Mat3 drot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 m;
    m << 0, 0, 0, 0, -s, -c, 0, c, -s;
    return m;
}

double angle_between(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

} // namespace

KappaFitResult fit_kappa(const std::vector<CalibrationSample>& samples, const RigGeometry& rig) {
    if (samples.size() < 4) throw InsufficientSamples("fit_kappa: need at least 4 samples");
    std::set<long> depth_keys;
    for (const auto& s : samples) {
        depth_keys.insert(std::lround((s.target - rig.eye_mid()).norm() * 1e4));
    }
    if (depth_keys.size() < 2) {
        throw InsufficientSamples("fit_kappa: samples must span at least 2 depths");
    }

    struct EyeSample {
        Vec3 optical;
        Vec3 truth;
    };
    std::vector<EyeSample> left, right;
    left.reserve(samples.size());
    right.reserve(samples.size());
    for (const auto& s : samples) {
        left.push_back({(s.pair.p_left - rig.eye_center_left).normalized(),
                        (s.target - rig.eye_center_left).normalized()});
        right.push_back({(s.pair.p_right - rig.eye_center_right).normalized(),
                         (s.target - rig.eye_center_right).normalized()});
    }

    // Params: (left_h, left_v, right_h, right_v). Residuals are the chord
    // vectors R(kappa)*optical - truth, three per eye per sample.
    const auto eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
        const std::size_t n = samples.size();
        r.resize(static_cast<Eigen::Index>(6 * n));
        if (jac != nullptr) jac->setZero(static_cast<Eigen::Index>(6 * n), 4);
        for (int eye = 0; eye < 2; ++eye) {
            const double h = x[2 * eye], v = x[2 * eye + 1];
            const Mat3 ry = rot_y(h), rxv = rot_x(-v);
            const Mat3 rot = ry * rxv;
            const Mat3 dh = drot_y(h) * rxv;
            const Mat3 dv = ry * drot_x(-v) * -1.0;
            const auto& data = eye == 0 ? left : right;
            for (std::size_t i = 0; i < n; ++i) {
                const Eigen::Index row = static_cast<Eigen::Index>(6 * i + 3 * eye);
                r.segment<3>(row) = rot * data[i].optical - data[i].truth;
                if (jac != nullptr) {
                    jac->block<3, 1>(row, 2 * eye) = dh * data[i].optical;
                    jac->block<3, 1>(row, 2 * eye + 1) = dv * data[i].optical;
                }
            }
        }
    };

    LevMarOptions opts;
    opts.max_iterations = 200;
    opts.gradient_tol = 1e-15;
    const LevMarResult lm = lm_solve(Eigen::Vector4d::Zero(), eval, opts);
    if (!lm.converged) throw NoConvergence("fit_kappa: optimizer did not converge");

    KappaFitResult out;
    out.kappa.left = Vec2(lm.params[0], lm.params[1]);
    out.kappa.right = Vec2(lm.params[2], lm.params[3]);
    out.cost_history = lm.cost_history;

    double sq = 0.0;
    const Mat3 rl = kappa_rotation(out.kappa.left.x(), out.kappa.left.y());
    const Mat3 rr = kappa_rotation(out.kappa.right.x(), out.kappa.right.y());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double al = angle_between(rl * left[i].optical, left[i].truth);
        const double ar = angle_between(rr * right[i].optical, right[i].truth);
        sq += al * al + ar * ar;
    }
    out.residual_rms_rad = std::sqrt(sq / (2.0 * static_cast<double>(samples.size())));
    return out;
}

namespace {

struct ExpCoreFit {
    double k1, k2, k3;
    double cost;
    bool ok;
};

ExpCoreFit fit_exp_core(const std::vector<ThetaDepthPair>& pts, double theta_bar) {
    const auto solve_from = [&](double k1_0, double k2_0, double k3_0) {
        const auto eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
            r.resize(static_cast<Eigen::Index>(pts.size()));
            if (jac != nullptr) jac->resize(static_cast<Eigen::Index>(pts.size()), 3);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double dt = pts[i].theta - theta_bar;
                const double e = std::exp(x[1] * dt);
                r[static_cast<Eigen::Index>(i)] = x[0] * e + x[2] - pts[i].depth;
                if (jac != nullptr) {
                    (*jac)(static_cast<Eigen::Index>(i), 0) = e;
                    (*jac)(static_cast<Eigen::Index>(i), 1) = x[0] * dt * e;
                    (*jac)(static_cast<Eigen::Index>(i), 2) = 1.0;
                }
            }
        };
        LevMarOptions opts;
        opts.max_iterations = 300;
        opts.gradient_tol = 1e-14;
        const LevMarResult lm = lm_solve(Eigen::Vector3d(k1_0, k2_0, k3_0), eval, opts);
        ExpCoreFit fit{lm.params[0], lm.params[1], lm.params[2], lm.cost_history.back(),
                       lm.converged};
        return fit;
    };

    // Log-linear initialization on the shifted depths; tried with both signs
    // of k1 since the shift direction is unknown for noisy data.
    const auto [dmin_it, dmax_it] = std::minmax_element(
        pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.depth < b.depth; });
    const double dmin = dmin_it->depth, dmax = dmax_it->depth;
    const double eps = std::max(1e-3, 1e-3 * (dmax - dmin));

    const auto log_linear = [&](bool mirrored) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& p : pts) {
            const double y = mirrored ? dmax + eps - p.depth : p.depth - dmin + eps;
            const double ly = std::log(y);
            const double dt = p.theta - theta_bar;
            sx += dt;
            sy += ly;
            sxx += dt * dt;
            sxy += dt * ly;
        }
        const double n = static_cast<double>(pts.size());
        const double denom = n * sxx - sx * sx;
        const double b = std::abs(denom) > 1e-30 ? (n * sxy - sx * sy) / denom : 0.0;
        const double a = (sy - b * sx) / n;
        if (mirrored) return solve_from(-std::exp(a), b, dmax + eps);
        return solve_from(std::exp(a), b, dmin - eps);
    };

    ExpCoreFit best = log_linear(false);
    const ExpCoreFit alt = log_linear(true);
    if ((alt.ok && !best.ok) || (alt.ok == best.ok && alt.cost < best.cost)) best = alt;
    return best;
}

} // namespace

ExponentialFitResult fit_exponential(const std::vector<ThetaDepthPair>& pairs,
                                     const RansacConfig& ransac, IpdUnits units) {
    ransac.validate();
    const std::size_t n = pairs.size();
    if (n < static_cast<std::size_t>(ransac.min_samples)) {
        throw InsufficientSamples("fit_exponential: fewer pairs than ransac.min_samples");
    }
    const auto [tmin, tmax] = std::minmax_element(
        pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.theta < b.theta; });
    if (tmax->theta - tmin->theta < 1e-12) {
        throw DegenerateData("fit_exponential: all theta values equal");
    }

    const auto fit_on = [&](const std::vector<std::size_t>& idx) {
        std::vector<ThetaDepthPair> subset;
        subset.reserve(idx.size());
        double tb = 0.0;
        for (std::size_t i : idx) {
            subset.push_back(pairs[i]);
            tb += pairs[i].theta;
        }
        tb /= static_cast<double>(idx.size());
        ExpCoreFit core = fit_exp_core(subset, tb);
        return std::pair<ExpCoreFit, double>(core, tb);
    };

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);

    std::vector<std::size_t> best_inliers;
    if (ransac.iterations > 0 && n > static_cast<std::size_t>(ransac.min_samples)) {
        std::mt19937_64 rng(ransac.seed);
        std::vector<std::size_t> pool(all);
        int best_count = -1;
        for (int it = 0; it < ransac.iterations; ++it) {
            // Partial Fisher-Yates draw of min_samples distinct indices.
            for (int k = 0; k < ransac.min_samples; ++k) {
                std::uniform_int_distribution<std::size_t> pick(k, n - 1);
                std::swap(pool[static_cast<std::size_t>(k)], pool[pick(rng)]);
            }
            const std::vector<std::size_t> subset(pool.begin(),
                                                  pool.begin() + ransac.min_samples);
            const auto [core, tb] = fit_on(subset);
            if (!core.ok || !std::isfinite(core.cost)) continue;
            std::vector<std::size_t> inliers;
            for (std::size_t i = 0; i < n; ++i) {
                const double pred = core.k1 * std::exp(core.k2 * (pairs[i].theta - tb)) + core.k3;
                if (std::abs(pred - pairs[i].depth) <= ransac.inlier_threshold) {
                    inliers.push_back(i);
                }
            }
            if (static_cast<int>(inliers.size()) > best_count) {
                best_count = static_cast<int>(inliers.size());
                best_inliers = std::move(inliers);
            }
        }
        if (best_count < static_cast<int>(std::ceil(ransac.min_inlier_fraction *
                                                    static_cast<double>(n) - 1e-12))) {
            throw RansacFailure("fit_exponential: no model reached min_inlier_fraction");
        }
    } else {
        best_inliers = all;
    }
    if (best_inliers.size() < static_cast<std::size_t>(ransac.min_samples)) {
        throw RansacFailure("fit_exponential: consensus set smaller than min_samples");
    }

    const auto [core, tb] = fit_on(best_inliers);
    if (!core.ok) throw NoConvergence("fit_exponential: refit did not converge");

    ExponentialFitResult out;
    out.model.k1 = core.k1;
    out.model.k2 = core.k2;
    out.model.k3 = core.k3;
    out.model.theta_bar = tb;
    out.model.units = units;
    if (!(std::abs(out.model.k2) > 0.0) || !out.model.fitted()) {
        throw NoConvergence("fit_exponential: degenerate fitted parameters");
    }

    out.inlier_mask.assign(n, true);
    if (ransac.iterations > 0) {
        double sq = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double resid = out.model.predict(pairs[i].theta) - pairs[i].depth;
            out.inlier_mask[i] = std::abs(resid) <= ransac.inlier_threshold;
            if (out.inlier_mask[i]) {
                sq += resid * resid;
                ++count;
            }
        }
        out.rms = count > 0 ? std::sqrt(sq / static_cast<double>(count)) : 0.0;
    } else {
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double resid = out.model.predict(pairs[i].theta) - pairs[i].depth;
            sq += resid * resid;
        }
        out.rms = std::sqrt(sq / static_cast<double>(n));
    }
    return out;
}

SectoredFitResult fit_sectored(const std::vector<CalibrationSample>& samples,
                               const std::array<double, 2>& boundaries,
                               const RansacConfig& ransac, const RigGeometry& rig,
                               IpdUnits units, const IpdOptions& opts) {
    if (!(boundaries[0] < boundaries[1])) {
        throw ConfigError("fit_sectored: boundaries must be strictly increasing");
    }
    SectoredRegression reg;
    reg.boundaries = boundaries;

    const Vec3 mid = rig.eye_mid();
    std::array<std::vector<ThetaDepthPair>, 3> sectors;
    for (const auto& s : samples) {
        const Vec3 d = s.target - mid;
        const double angle = std::atan2(d.x(), d.z());
        const double theta =
            units == IpdUnits::Millimeters ? ipd_mm(s.pair, opts) : ipd_px(s.pair, opts);
        sectors[static_cast<std::size_t>(reg.sector_of(angle))].push_back(
            ThetaDepthPair{theta, d.norm()});
    }

    SectoredFitResult out;
    for (std::size_t k = 0; k < 3; ++k) {
        if (sectors[k].size() < static_cast<std::size_t>(ransac.min_samples)) {
            throw SectorUnderpopulated("fit_sectored: sector " + std::to_string(k) +
                                       " has too few samples");
        }
        const ExponentialFitResult fit = fit_exponential(sectors[k], ransac, units);
        reg.models[k] = fit.model;
        out.sector_rms[k] = fit.rms;
        out.sector_counts[k] = static_cast<int>(sectors[k].size());
    }
    out.regression = reg;
    return out;
}

ThresholdTable build_threshold_table(const std::vector<BinErrorStat>& stats) {
    if (stats.empty()) throw EmptyStats("build_threshold_table: no error statistics");
    ThresholdTable table;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& s = stats[i];
        if (!(s.lo < s.hi)) throw ConfigError("build_threshold_table: bin lo must be < hi");
        if (i > 0 && std::abs(stats[i - 1].hi - s.lo) > 1e-9) {
            throw ConfigError("build_threshold_table: bins must be contiguous");
        }
        const double delta = s.mean + s.stddev;
        if (!(delta > 0.0)) {
            throw DegenerateStats("build_threshold_table: delta must be > 0");
        }
        table.bins.push_back(ThresholdBin{s.lo, s.hi, delta});
    }
    return table;
}

double ThresholdTable::delta_at(double distance) const {
    for (const auto& b : bins) {
        if (distance > b.lo && distance <= b.hi) return b.delta;
    }
    throw ConfigError("ThresholdTable: distance outside the calibrated bins");
}

std::vector<Vec3> ChessboardLayout::corners() const {
    if (rows < 2 || cols < 2 || !(square > 0.0)) {
        throw ConfigError("ChessboardLayout: need rows, cols >= 2 and square > 0");
    }
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(rows * cols));
    for (int j = 0; j < rows; ++j) {
        for (int i = 0; i < cols; ++i) {
            out.emplace_back(i * square, j * square, 0.0);
        }
    }
    return out;
}

RigidTransform fit_rigid_transform(const std::vector<Vec3>& src, const std::vector<Vec3>& dst,
                                   double* rms) {
    if (src.size() != dst.size() || src.size() < 3) {
        throw ConfigError("fit_rigid_transform: need >= 3 paired points");
    }
    Vec3 cs = Vec3::Zero(), cd = Vec3::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        cs += src[i];
        cd += dst[i];
    }
    cs /= static_cast<double>(src.size());
    cd /= static_cast<double>(src.size());

    Mat3 h = Mat3::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        h += (src[i] - cs) * (dst[i] - cd).transpose();
    }
    Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    const Mat3 r = svd.matrixV() * d * svd.matrixU().transpose();
    if (std::abs(r.determinant() - 1.0) > kOrthonormalTol) {
        throw ImproperRotation("fit_rigid_transform: produced a non-proper rotation");
    }
    const RigidTransform t(r, cd - r * cs);
    if (rms != nullptr) {
        double sq = 0.0;
        for (std::size_t i = 0; i < src.size(); ++i) {
            sq += (t.apply(src[i]) - dst[i]).squaredNorm();
        }
        *rms = std::sqrt(sq / static_cast<double>(src.size()));
    }
    return t;
}

MirrorCalibrationResult calibrate_rig_with_mirror(const RigObservation& obs) {
    // Mirror plane: the z = 0 plane of F expressed in S.
    const Vec3 normal = obs.pose_F_in_S.rotation.col(2);
    const double offset = normal.dot(obs.pose_F_in_S.translation);
    if (std::abs(offset) < 1e-6) {
        throw MirrorDegenerate("calibrate_rig_with_mirror: mirror plane passes through the "
                               "scene camera origin");
    }
    const Plane mirror(normal, offset);

    const std::vector<Vec3> local = obs.layout.corners();
    std::vector<Vec3> reflected;
    reflected.reserve(local.size());
    for (const Vec3& c : local) {
        reflected.push_back(reflect_point(mirror, obs.pose_E_virtual_in_S.apply(c)));
    }

    // Refit a proper pose from the reflected corner points; the intermediate
    // reflection is improper but the planar grid admits an exact proper fit.
    double rms = 0.0;
    const RigidTransform pose_E_in_S = fit_rigid_transform(local, reflected, &rms);

    const RigidTransform scene_from_eye =
        pose_E_in_S.compose(obs.g_in_e).compose(obs.pose_G_in_N.inverse());
    return MirrorCalibrationResult{scene_from_eye, mirror, rms};
}

} // namespace vergekit
