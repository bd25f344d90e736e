// Python bindings for the vergekit core. Eigen vectors map to numpy arrays;
// raster images convert to and from (h, w[, c]) uint8 arrays.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vergekit/calibration.hpp"
#include "vergekit/control.hpp"
#include "vergekit/depth.hpp"
#include "vergekit/eval.hpp"
#include "vergekit/eye_sim.hpp"
#include "vergekit/io.hpp"
#include "vergekit/scene.hpp"

namespace py = pybind11;
using namespace vergekit;

namespace {

py::array_t<std::uint8_t> image_to_numpy(const RasterImage& img) {
    if (img.channels == 1) {
        py::array_t<std::uint8_t> out({img.height, img.width});
        std::copy(img.data.begin(), img.data.end(), out.mutable_data());
        return out;
    }
    py::array_t<std::uint8_t> out({img.height, img.width, img.channels});
    std::copy(img.data.begin(), img.data.end(), out.mutable_data());
    return out;
}

RasterImage image_from_numpy(const py::array_t<std::uint8_t, py::array::c_style>& arr) {
    if (arr.ndim() != 2 && arr.ndim() != 3) {
        throw ConfigError("image arrays must have shape (h, w) or (h, w, c)");
    }
    const int h = static_cast<int>(arr.shape(0));
    const int w = static_cast<int>(arr.shape(1));
    const int c = arr.ndim() == 2 ? 1 : static_cast<int>(arr.shape(2));
    RasterImage img(w, h, c);
    std::copy(arr.data(), arr.data() + img.data.size(), img.data.begin());
    return img;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "vergekit core: gaze-vergence depth estimation and see-through control";

    py::register_exception<ConfigError>(m, "VergekitConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "VergekitNumericError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "VergekitIoError", PyExc_IOError);

    m.def("deg2rad", &deg2rad);
    m.def("rad2deg", &rad2deg);

    // --- geometry ---------------------------------------------------------

    py::class_<Ray>(m, "Ray")
        .def(py::init<const Vec3&, const Vec3&>(), py::arg("origin"), py::arg("direction"))
        .def_readonly("origin", &Ray::origin)
        .def_readonly("direction", &Ray::direction)
        .def("at", &Ray::at);

    py::class_<RigidTransform>(m, "RigidTransform")
        .def(py::init<>())
        .def(py::init<const Mat3&, const Vec3&>(), py::arg("rotation"), py::arg("translation"))
        .def_readonly("rotation", &RigidTransform::rotation)
        .def_readonly("translation", &RigidTransform::translation)
        .def("apply", &RigidTransform::apply)
        .def("inverse", &RigidTransform::inverse)
        .def("compose", &RigidTransform::compose);

    py::class_<PinholeCamera>(m, "PinholeCamera")
        .def(py::init<double, double, double, double, int, int>(), py::arg("fx"),
             py::arg("fy"), py::arg("cx"), py::arg("cy"), py::arg("width"), py::arg("height"))
        .def_readonly("fx", &PinholeCamera::fx)
        .def_readonly("fy", &PinholeCamera::fy)
        .def_readonly("cx", &PinholeCamera::cx)
        .def_readonly("cy", &PinholeCamera::cy)
        .def_readonly("width", &PinholeCamera::width)
        .def_readonly("height", &PinholeCamera::height);

    py::class_<Plane>(m, "Plane")
        .def(py::init<const Vec3&, double>(), py::arg("normal"), py::arg("offset"))
        .def_readonly("normal", &Plane::normal)
        .def_readonly("offset", &Plane::offset)
        .def("signed_distance", &Plane::signed_distance);

    m.def("closest_point_between_rays", [](const Ray& a, const Ray& b) {
        const auto cp = closest_point_between_rays(a, b);
        return py::make_tuple(cp.midpoint, cp.gap, cp.s, cp.t);
    });
    m.def("project_point", &project_point);
    m.def("back_project", &back_project);
    m.def("reflect_point", &reflect_point);
    m.def("ray_plane_intersection", &ray_plane_intersection);

    // --- eye simulation -----------------------------------------------------

    py::class_<EyeCameraRig>(m, "EyeCameraRig")
        .def_readwrite("camera", &EyeCameraRig::camera)
        .def_readwrite("head_to_cam", &EyeCameraRig::head_to_cam);

    py::class_<RigGeometry>(m, "RigGeometry")
        .def(py::init<>())
        .def_readwrite("eye_center_left", &RigGeometry::eye_center_left)
        .def_readwrite("eye_center_right", &RigGeometry::eye_center_right)
        .def_readwrite("eyeball_radius", &RigGeometry::eyeball_radius)
        .def("eye_mid", &RigGeometry::eye_mid);

    py::class_<SubjectModel>(m, "SubjectModel")
        .def_static("default_subject", &SubjectModel::default_subject,
                    py::arg("head_height") = 1.6, py::arg("kappa_magnitude") = deg2rad(5.0))
        .def_readwrite("eyeball_center_left", &SubjectModel::eyeball_center_left)
        .def_readwrite("eyeball_center_right", &SubjectModel::eyeball_center_right)
        .def_readwrite("eyeball_radius", &SubjectModel::eyeball_radius)
        .def_readwrite("kappa_left", &SubjectModel::kappa_left)
        .def_readwrite("kappa_right", &SubjectModel::kappa_right)
        .def_readwrite("eye_cam_left", &SubjectModel::eye_cam_left)
        .def_readwrite("eye_cam_right", &SubjectModel::eye_cam_right)
        .def("geometry", &SubjectModel::geometry)
        .def("eye_mid", &SubjectModel::eye_mid);

    py::class_<CalibrationSceneConfig>(m, "CalibrationSceneConfig")
        .def(py::init<>())
        .def_readwrite("depths", &CalibrationSceneConfig::depths)
        .def_readwrite("lateral_angle", &CalibrationSceneConfig::lateral_angle)
        .def_readwrite("target_visual_angle", &CalibrationSceneConfig::target_visual_angle)
        .def_readwrite("dwell_seconds", &CalibrationSceneConfig::dwell_seconds)
        .def_readwrite("record_seconds", &CalibrationSceneConfig::record_seconds)
        .def_readwrite("sample_rate", &CalibrationSceneConfig::sample_rate);

    py::class_<PupilSamplePair>(m, "PupilSamplePair")
        .def(py::init<>())
        .def_readwrite("timestamp", &PupilSamplePair::timestamp)
        .def_readwrite("p_left", &PupilSamplePair::p_left)
        .def_readwrite("p_right", &PupilSamplePair::p_right)
        .def_readwrite("px_left", &PupilSamplePair::px_left)
        .def_readwrite("px_right", &PupilSamplePair::px_right);

    py::class_<StreamSample>(m, "StreamSample")
        .def(py::init<>())
        .def_readwrite("pair", &StreamSample::pair)
        .def_readwrite("truth_fixation", &StreamSample::truth_fixation)
        .def_readwrite("truth_depth", &StreamSample::truth_depth);

    py::class_<GazeStream>(m, "GazeStream")
        .def(py::init<>())
        .def_readwrite("samples", &GazeStream::samples);

    py::class_<ScriptedFixation>(m, "ScriptedFixation")
        .def(py::init<double, const Vec3&>(), py::arg("duration"), py::arg("point"))
        .def_readwrite("duration", &ScriptedFixation::duration)
        .def_readwrite("point", &ScriptedFixation::point);

    m.def("generate_calibration_targets", &generate_calibration_targets, py::arg("config"),
          py::arg("head_height"));
    m.def(
        "simulate_fixation",
        [](const SubjectModel& subject, const Vec3& fixation, double noise_sigma,
           std::uint64_t seed) {
            if (noise_sigma <= 0.0) return simulate_fixation(subject, fixation);
            std::mt19937_64 rng(seed);
            return simulate_fixation(subject, fixation, noise_sigma, rng);
        },
        py::arg("subject"), py::arg("fixation"), py::arg("noise_sigma") = 0.0,
        py::arg("seed") = 0);
    m.def("simulate_stream", &simulate_stream, py::arg("subject"), py::arg("script"),
          py::arg("rate") = 30.0, py::arg("noise_sigma") = 0.0, py::arg("seed") = 0);
    m.def("simulate_calibration_stream", &simulate_calibration_stream, py::arg("subject"),
          py::arg("config"), py::arg("head_height") = 1.6, py::arg("noise_sigma") = 0.0,
          py::arg("seed") = 0);

    // --- calibration -----------------------------------------------------------

    py::class_<KappaModel>(m, "KappaModel")
        .def(py::init<>())
        .def(py::init([](const Vec2& left, const Vec2& right) {
                 return KappaModel{left, right};
             }),
             py::arg("left"), py::arg("right"))
        .def_readwrite("left", &KappaModel::left)
        .def_readwrite("right", &KappaModel::right);

    py::class_<KappaFitResult>(m, "KappaFitResult")
        .def_readonly("kappa", &KappaFitResult::kappa)
        .def_readonly("residual_rms_rad", &KappaFitResult::residual_rms_rad)
        .def_readonly("cost_history", &KappaFitResult::cost_history);

    py::class_<CalibrationSample>(m, "CalibrationSample")
        .def(py::init([](const PupilSamplePair& pair, const Vec3& target) {
                 return CalibrationSample{pair, target};
             }),
             py::arg("pair"), py::arg("target"))
        .def_readwrite("pair", &CalibrationSample::pair)
        .def_readwrite("target", &CalibrationSample::target);

    m.def("fit_kappa", &fit_kappa, py::arg("samples"), py::arg("rig"));

    py::enum_<IpdUnits>(m, "IpdUnits")
        .value("Millimeters", IpdUnits::Millimeters)
        .value("Pixels", IpdUnits::Pixels);

    py::enum_<MipdNorm>(m, "MipdNorm")
        .value("Euclidean", MipdNorm::Euclidean)
        .value("L1", MipdNorm::L1);

    py::class_<IpdOptions>(m, "IpdOptions")
        .def(py::init<>())
        .def_readwrite("mipd_norm", &IpdOptions::mipd_norm)
        .def_readwrite("image_width", &IpdOptions::image_width);

    py::class_<RegressionModel>(m, "RegressionModel")
        .def(py::init<>())
        .def(py::init([](double k1, double k2, double k3, double theta_bar, IpdUnits units) {
                 return RegressionModel{k1, k2, k3, theta_bar, units};
             }),
             py::arg("k1"), py::arg("k2"), py::arg("k3"), py::arg("theta_bar"),
             py::arg("units"))
        .def_readwrite("k1", &RegressionModel::k1)
        .def_readwrite("k2", &RegressionModel::k2)
        .def_readwrite("k3", &RegressionModel::k3)
        .def_readwrite("theta_bar", &RegressionModel::theta_bar)
        .def_readwrite("units", &RegressionModel::units)
        .def("predict", &RegressionModel::predict)
        .def("fitted", &RegressionModel::fitted);

    py::class_<RansacConfig>(m, "RansacConfig")
        .def(py::init<>())
        .def_readwrite("iterations", &RansacConfig::iterations)
        .def_readwrite("min_samples", &RansacConfig::min_samples)
        .def_readwrite("inlier_threshold", &RansacConfig::inlier_threshold)
        .def_readwrite("min_inlier_fraction", &RansacConfig::min_inlier_fraction)
        .def_readwrite("seed", &RansacConfig::seed);

    py::class_<ThetaDepthPair>(m, "ThetaDepthPair")
        .def(py::init([](double theta, double depth) {
                 return ThetaDepthPair{theta, depth};
             }),
             py::arg("theta"), py::arg("depth"))
        .def_readwrite("theta", &ThetaDepthPair::theta)
        .def_readwrite("depth", &ThetaDepthPair::depth);

    py::class_<ExponentialFitResult>(m, "ExponentialFitResult")
        .def_readonly("model", &ExponentialFitResult::model)
        .def_readonly("inlier_mask", &ExponentialFitResult::inlier_mask)
        .def_readonly("rms", &ExponentialFitResult::rms);

    m.def("fit_exponential", &fit_exponential, py::arg("pairs"), py::arg("ransac"),
          py::arg("units") = IpdUnits::Millimeters);

    py::class_<SectoredRegression>(m, "SectoredRegression")
        .def(py::init<>())
        .def_readwrite("boundaries", &SectoredRegression::boundaries)
        .def_readwrite("models", &SectoredRegression::models)
        .def("sector_of", &SectoredRegression::sector_of)
        .def("fitted", &SectoredRegression::fitted);

    py::class_<SectoredFitResult>(m, "SectoredFitResult")
        .def_readonly("regression", &SectoredFitResult::regression)
        .def_readonly("sector_rms", &SectoredFitResult::sector_rms)
        .def_readonly("sector_counts", &SectoredFitResult::sector_counts);

    m.def("fit_sectored", &fit_sectored, py::arg("samples"), py::arg("boundaries"),
          py::arg("ransac"), py::arg("rig"), py::arg("units"),
          py::arg("options") = IpdOptions{});

    py::class_<ThresholdBin>(m, "ThresholdBin")
        .def_readonly("lo", &ThresholdBin::lo)
        .def_readonly("hi", &ThresholdBin::hi)
        .def_readonly("delta", &ThresholdBin::delta);

    py::class_<ThresholdTable>(m, "ThresholdTable")
        .def(py::init<>())
        .def_readonly("bins", &ThresholdTable::bins)
        .def("delta_at", &ThresholdTable::delta_at);

    py::class_<BinErrorStat>(m, "BinErrorStat")
        .def(py::init([](double lo, double hi, double mean, double stddev) {
                 return BinErrorStat{lo, hi, mean, stddev};
             }),
             py::arg("lo"), py::arg("hi"), py::arg("mean"), py::arg("stddev"))
        .def_readwrite("lo", &BinErrorStat::lo)
        .def_readwrite("hi", &BinErrorStat::hi)
        .def_readwrite("mean", &BinErrorStat::mean)
        .def_readwrite("stddev", &BinErrorStat::stddev);

    m.def("build_threshold_table", &build_threshold_table);

    py::class_<ChessboardLayout>(m, "ChessboardLayout")
        .def(py::init<>())
        .def(py::init([](int rows, int cols, double square) {
                 return ChessboardLayout{rows, cols, square};
             }),
             py::arg("rows"), py::arg("cols"), py::arg("square"))
        .def_readwrite("rows", &ChessboardLayout::rows)
        .def_readwrite("cols", &ChessboardLayout::cols)
        .def_readwrite("square", &ChessboardLayout::square)
        .def("corners", &ChessboardLayout::corners);

    py::class_<RigObservation>(m, "RigObservation")
        .def(py::init<>())
        .def_readwrite("pose_E_virtual_in_S", &RigObservation::pose_E_virtual_in_S)
        .def_readwrite("pose_F_in_S", &RigObservation::pose_F_in_S)
        .def_readwrite("pose_G_in_N", &RigObservation::pose_G_in_N)
        .def_readwrite("layout", &RigObservation::layout)
        .def_readwrite("g_in_e", &RigObservation::g_in_e);

    py::class_<MirrorCalibrationResult>(m, "MirrorCalibrationResult")
        .def_readonly("scene_from_eye", &MirrorCalibrationResult::scene_from_eye)
        .def_readonly("mirror_plane", &MirrorCalibrationResult::mirror_plane)
        .def_readonly("corner_rms", &MirrorCalibrationResult::corner_rms);

    m.def("calibrate_rig_with_mirror", &calibrate_rig_with_mirror);
    m.def("fit_rigid_transform",
          [](const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
              double rms = 0.0;
              const RigidTransform t = fit_rigid_transform(src, dst, &rms);
              return py::make_tuple(t, rms);
          });

    py::class_<CalibrationBundle>(m, "CalibrationBundle")
        .def(py::init<>())
        .def_readwrite("kappa", &CalibrationBundle::kappa)
        .def_readwrite("kappa_residual_rad", &CalibrationBundle::kappa_residual_rad)
        .def_readwrite("mipd", &CalibrationBundle::mipd)
        .def_readwrite("pipd", &CalibrationBundle::pipd)
        .def_readwrite("thresholds", &CalibrationBundle::thresholds);

    // --- depth estimation ---------------------------------------------------------

    py::enum_<DepthMethod>(m, "DepthMethod")
        .value("LosI", DepthMethod::LosI)
        .value("MIPD", DepthMethod::MIPD)
        .value("PIPD", DepthMethod::PIPD)
        .value("Fused", DepthMethod::Fused);

    py::class_<GazeRayPair>(m, "GazeRayPair")
        .def(py::init([](const Ray& left, const Ray& right, const Vec3& mid) {
                 return GazeRayPair{left, right, mid};
             }),
             py::arg("left"), py::arg("right"), py::arg("eye_center_mid"))
        .def_readwrite("left", &GazeRayPair::left)
        .def_readwrite("right", &GazeRayPair::right)
        .def_readwrite("eye_center_mid", &GazeRayPair::eye_center_mid)
        .def("horizontal_angle", &GazeRayPair::horizontal_angle);

    py::class_<DepthEstimate>(m, "DepthEstimate")
        .def_readonly("depth", &DepthEstimate::depth)
        .def_readonly("method", &DepthEstimate::method)
        .def_readonly("por", &DepthEstimate::por)
        .def_readonly("horizontal_angle", &DepthEstimate::horizontal_angle)
        .def_readonly("fused_source", &DepthEstimate::fused_source)
        .def_readonly("losi_fallback", &DepthEstimate::losi_fallback);

    m.def("gaze_rays_from_pupils", &gaze_rays_from_pupils, py::arg("pair"), py::arg("kappa"),
          py::arg("rig"));
    m.def("depth_losi", &depth_losi);
    m.def("ipd_mm", &ipd_mm, py::arg("pair"), py::arg("options") = IpdOptions{});
    m.def("ipd_px", &ipd_px, py::arg("pair"), py::arg("options") = IpdOptions{});
    m.def("depth_regress", &depth_regress, py::arg("theta"), py::arg("regression"),
          py::arg("horizontal_angle"));
    m.def("depth_fused", &depth_fused, py::arg("pair"), py::arg("rays"),
          py::arg("pipd_regression"), py::arg("options") = IpdOptions{});

    // --- vergence control ------------------------------------------------------------

    py::enum_<ControlMode>(m, "ControlMode")
        .value("StimulusGuided", ControlMode::StimulusGuided)
        .value("SelfControl", ControlMode::SelfControl);

    m.attr("SENTINEL_CLOSED") = kSentinelClosed;

    py::class_<ControlConfig>(m, "ControlConfig")
        .def(py::init<>())
        .def_readwrite("w", &ControlConfig::w)
        .def_readwrite("delta", &ControlConfig::delta)
        .def_readwrite("j", &ControlConfig::j)
        .def_readwrite("filter_window", &ControlConfig::filter_window)
        .def_readwrite("sample_rate", &ControlConfig::sample_rate)
        .def_readwrite("mode", &ControlConfig::mode)
        .def_readwrite("stimulus_distance", &ControlConfig::stimulus_distance)
        .def_readwrite("stimulus_edge", &ControlConfig::stimulus_edge)
        .def_readwrite("stimulus_alpha", &ControlConfig::stimulus_alpha)
        .def("validate", &ControlConfig::validate)
        .def("open_threshold", &ControlConfig::open_threshold)
        .def("open_gamma", &ControlConfig::open_gamma);

    py::class_<ControlState>(m, "ControlState")
        .def(py::init<>())
        .def_readonly("window_open", &ControlState::window_open)
        .def_readonly("gamma", &ControlState::gamma)
        .def_readonly("window_pose", &ControlState::window_pose);

    py::enum_<ControlEventKind>(m, "ControlEventKind")
        .value("NoChange", ControlEventKind::NoChange)
        .value("Opened", ControlEventKind::Opened)
        .value("Closed", ControlEventKind::Closed)
        .value("LayerChanged", ControlEventKind::LayerChanged);

    py::class_<StimulusRecord>(m, "StimulusRecord")
        .def_readonly("position", &StimulusRecord::position)
        .def_readonly("edge", &StimulusRecord::edge)
        .def_readonly("alpha", &StimulusRecord::alpha);

    py::class_<ControlEvent>(m, "ControlEvent")
        .def(py::init<>())
        .def_readwrite("kind", &ControlEvent::kind)
        .def_readwrite("t", &ControlEvent::t)
        .def_readwrite("gamma", &ControlEvent::gamma)
        .def_readwrite("window_pose", &ControlEvent::window_pose)
        .def_readwrite("layer_index", &ControlEvent::layer_index)
        .def_readwrite("stimulus", &ControlEvent::stimulus);

    m.def("filter_push", &filter_push, py::arg("state"), py::arg("config"), py::arg("t"),
          py::arg("depth"));
    m.def("control_step", &control_step, py::arg("state"), py::arg("config"), py::arg("gaze"),
          py::arg("eye_mid"), py::arg("phi"));
    m.def("stimulus_pose", &stimulus_pose, py::arg("gaze"), py::arg("eye_mid"),
          py::arg("config"));

    py::class_<Layer>(m, "Layer")
        .def(py::init([](double lo, double hi, double display_depth) {
                 return Layer{lo, hi, display_depth};
             }),
             py::arg("lo"), py::arg("hi"), py::arg("display_depth"))
        .def_readwrite("lo", &Layer::lo)
        .def_readwrite("hi", &Layer::hi)
        .def_readwrite("display_depth", &Layer::display_depth);

    py::class_<LayerTable>(m, "LayerTable")
        .def(py::init<>())
        .def_static("default_table", &LayerTable::default_table)
        .def_readwrite("layers", &LayerTable::layers)
        .def("validate", &LayerTable::validate);

    m.def("layer_select", &layer_select, py::arg("phi"), py::arg("table"));

    py::class_<ControlInput>(m, "ControlInput")
        .def(py::init([](double t, const DepthEstimate& est, const Ray& gaze,
                         const Vec3& eye_mid) {
                 return ControlInput{t, est, gaze, eye_mid};
             }),
             py::arg("t"), py::arg("estimate"), py::arg("gaze"), py::arg("eye_mid"))
        .def_readwrite("t", &ControlInput::t)
        .def_readwrite("estimate", &ControlInput::estimate)
        .def_readwrite("gaze", &ControlInput::gaze)
        .def_readwrite("eye_mid", &ControlInput::eye_mid);

    m.def("run_control", &run_control, py::arg("stream"), py::arg("config"));

    // --- scene capture ------------------------------------------------------------------

    py::class_<Correspondence>(m, "Correspondence")
        .def(py::init([](const Vec3& world, const Vec2& pixel) {
                 return Correspondence{world, pixel};
             }),
             py::arg("world"), py::arg("pixel"))
        .def_readwrite("world", &Correspondence::world)
        .def_readwrite("pixel", &Correspondence::pixel);

    py::class_<PnpResult>(m, "PnpResult")
        .def_readonly("pose", &PnpResult::pose)
        .def_readonly("rms_px", &PnpResult::rms_px);

    m.def("register_camera", &register_camera, py::arg("correspondences"), py::arg("camera"));

    py::class_<RoiSpec>(m, "RoiSpec")
        .def(py::init([](const Vec3& center, const Ray& gaze, double width, double height) {
                 return RoiSpec{center, gaze, width, height};
             }),
             py::arg("center"), py::arg("gaze"), py::arg("width") = 0.6,
             py::arg("height") = 0.45)
        .def_readwrite("center", &RoiSpec::center)
        .def_readwrite("gaze", &RoiSpec::gaze)
        .def_readwrite("width", &RoiSpec::width)
        .def_readwrite("height", &RoiSpec::height);

    m.def("roi_corners", &roi_corners);
    m.def("roi_to_camera_quad", [](const std::array<Vec3, 4>& corners, const RigidTransform& t,
                                   const PinholeCamera& cam) {
        const auto proj = roi_to_camera_quad(corners, t, cam);
        return py::make_tuple(proj.quad, proj.out_of_frame);
    });

    py::class_<Homography>(m, "Homography")
        .def(py::init<>())
        .def_readwrite("m", &Homography::m)
        .def("apply", &Homography::apply)
        .def("inverse", &Homography::inverse);

    m.def("homography_from_quad", &homography_from_quad, py::arg("src"), py::arg("dst"));

    py::class_<RasterImage>(m, "RasterImage")
        .def(py::init<int, int, int, std::uint8_t>(), py::arg("width"), py::arg("height"),
             py::arg("channels") = 1, py::arg("fill") = 0)
        .def_readonly("width", &RasterImage::width)
        .def_readonly("height", &RasterImage::height)
        .def_readonly("channels", &RasterImage::channels)
        .def("to_numpy", &image_to_numpy)
        .def_static("from_numpy", &image_from_numpy);

    m.def("warp_image",
          [](const py::array_t<std::uint8_t, py::array::c_style>& src, const Homography& h,
             int out_width, int out_height) {
              return image_to_numpy(warp_image(image_from_numpy(src), h, out_width,
                                               out_height));
          },
          py::arg("src"), py::arg("homography"), py::arg("out_width"), py::arg("out_height"));

    m.def("see_through_frame",
          [](const Vec3& por, const Ray& gaze, double roi_width, double roi_height,
             const RigidTransform& t, const PinholeCamera& cam,
             const py::array_t<std::uint8_t, py::array::c_style>& frame, int out_width,
             int out_height) {
              const auto result = see_through_frame(por, gaze, roi_width, roi_height, t, cam,
                                                    image_from_numpy(frame), out_width,
                                                    out_height);
              return py::make_tuple(image_to_numpy(result.image), result.out_of_frame);
          },
          py::arg("por"), py::arg("gaze"), py::arg("roi_width"), py::arg("roi_height"),
          py::arg("pose"), py::arg("camera"), py::arg("frame"), py::arg("out_width"),
          py::arg("out_height"));

    // --- session evaluation ----------------------------------------------------------------

    py::class_<ErrorBin>(m, "ErrorBin")
        .def_readonly("lo", &ErrorBin::lo)
        .def_readonly("hi", &ErrorBin::hi)
        .def_readonly("mean_abs_error", &ErrorBin::mean_abs_error)
        .def_readonly("stddev", &ErrorBin::stddev)
        .def_readonly("n", &ErrorBin::n);

    py::class_<ErrorTable>(m, "ErrorTable").def_readonly("bins", &ErrorTable::bins);

    py::class_<EstimateTruthPair>(m, "EstimateTruthPair")
        .def(py::init([](double estimate, double truth) {
                 return EstimateTruthPair{estimate, truth};
             }),
             py::arg("estimate"), py::arg("truth"))
        .def_readwrite("estimate", &EstimateTruthPair::estimate)
        .def_readwrite("truth", &EstimateTruthPair::truth);

    m.def("evaluate_depth", &evaluate_depth);

    py::enum_<SessionCommand>(m, "SessionCommand")
        .value("SeeThroughWall", SessionCommand::SeeThroughWall)
        .value("SeeWall", SessionCommand::SeeWall);

    py::class_<ScriptedCommand>(m, "ScriptedCommand")
        .def(py::init([](double issue_time, SessionCommand command) {
                 return ScriptedCommand{issue_time, command};
             }),
             py::arg("issue_time"), py::arg("command"))
        .def_readwrite("issue_time", &ScriptedCommand::issue_time)
        .def_readwrite("command", &ScriptedCommand::command);

    py::class_<SessionScript>(m, "SessionScript")
        .def(py::init<>())
        .def_readwrite("commands", &SessionScript::commands)
        .def_readwrite("timeout", &SessionScript::timeout)
        .def_readwrite("waiting_duration", &SessionScript::waiting_duration)
        .def_readwrite("repetitions", &SessionScript::repetitions);

    py::class_<SessionMetrics>(m, "SessionMetrics")
        .def_readonly("completion_times", &SessionMetrics::completion_times)
        .def_readonly("successes", &SessionMetrics::successes)
        .def_readonly("mistakes", &SessionMetrics::mistakes);

    m.def("replay_session", &replay_session, py::arg("events"), py::arg("script"));

    // --- file I/O -----------------------------------------------------------------------------

    auto io_mod = m.def_submodule("io", "file formats shared with the command-line tool");
    io_mod.def("save_subject", &io::save_subject);
    io_mod.def("load_subject", &io::load_subject);
    io_mod.def("save_scene", &io::save_scene);
    io_mod.def("load_scene", &io::load_scene);
    io_mod.def("save_fixation_script", &io::save_fixation_script);
    io_mod.def("load_fixation_script", &io::load_fixation_script);
    io_mod.def("save_session_script", &io::save_session_script);
    io_mod.def("load_session_script", &io::load_session_script);
    io_mod.def("save_stream", &io::save_stream);
    io_mod.def("load_stream", &io::load_stream);
    io_mod.def("save_bundle", &io::save_bundle);
    io_mod.def("load_bundle", &io::load_bundle);
    io_mod.def("save_events", &io::save_events);
    io_mod.def("load_events", &io::load_events);
    io_mod.def("save_error_table", &io::save_error_table);
    io_mod.def("save_session_metrics", &io::save_session_metrics);
    io_mod.def(
        "save_image",
        [](const io::Path& path, const py::array_t<std::uint8_t, py::array::c_style>& img) {
            io::save_image(path, image_from_numpy(img));
        });
    io_mod.def("load_image",
               [](const io::Path& path) { return image_to_numpy(io::load_image(path)); });

    py::class_<io::RigSpec>(io_mod, "RigSpec")
        .def(py::init<>())
        .def_readwrite("camera", &io::RigSpec::camera)
        .def_readwrite("world_to_cam", &io::RigSpec::world_to_cam);
    io_mod.def("save_rig", &io::save_rig);
    io_mod.def("load_rig", &io::load_rig);
}
