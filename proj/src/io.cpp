#include "vergekit/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace vergekit::io {

namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;

std::string read_file(const Path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const Path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_char(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

/// Data lines of a well-formed file: header checked, blanks and '#' comments
/// skipped.
std::vector<std::string> data_lines(const std::string& content, const std::string& kind,
                                    const Path& path) {
    std::vector<std::string> lines;
    std::istringstream ss(content);
    std::string line;
    bool header_seen = false;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header_seen) {
            const std::string expect = "# vergekit-" + kind + " ";
            if (line.rfind(expect, 0) != 0) {
                throw IoError(path.string() + ": missing '" + expect + "<version>' header");
            }
            header_seen = true;
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    if (!header_seen) throw IoError(path.string() + ": empty file");
    return lines;
}

std::string header(const std::string& kind) { return "# vergekit-" + kind + " 1\n"; }

double parse_num(const std::string& s, const Path& path) {
    try {
        return parse_double(s);
    } catch (const IoError&) {
        throw IoError(path.string() + ": bad number '" + s + "'");
    }
}

std::string fmt_vec3(const Vec3& v) {
    return fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z());
}

std::string fmt_pose(const RigidTransform& t) {
    std::string s;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) s += fmt(t.rotation(r, c)) + " ";
    }
    s += fmt(t.translation.x()) + " " + fmt(t.translation.y()) + " " + fmt(t.translation.z());
    return s;
}

RigidTransform parse_pose(const std::vector<std::string>& toks, std::size_t offset,
                          const Path& path) {
    if (toks.size() < offset + 12) throw IoError(path.string() + ": pose needs 12 numbers");
    Mat3 r;
    for (int i = 0; i < 9; ++i) r(i / 3, i % 3) = parse_num(toks[offset + i], path);
    const Vec3 t(parse_num(toks[offset + 9], path), parse_num(toks[offset + 10], path),
                 parse_num(toks[offset + 11], path));
    try {
        return RigidTransform(r, t);
    } catch (const ConfigError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

} // namespace

std::string fmt(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        // from_chars does not accept "inf"/"nan" spellings everywhere; handle them.
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::nan("");
        throw IoError("bad number '" + s + "'");
    }
    return v;
}

double deg_to_rad_file(double deg) {
    return static_cast<double>(static_cast<long double>(deg) * kPiL / 180.0L);
}

double rad_to_deg_file(double rad) {
    // Canonicalize to a fixed point of deg -> rad -> deg so that a value read
    // from a file re-serializes to identical bytes. The conversion pair is
    // monotone, so the iteration settles within a couple of steps (the first
    // conversion of a freshly fitted angle may move it by one ulp).
    double deg = static_cast<double>(static_cast<long double>(rad) * 180.0L / kPiL);
    for (int i = 0; i < 8; ++i) {
        const double next = static_cast<double>(
            static_cast<long double>(deg_to_rad_file(deg)) * 180.0L / kPiL);
        if (next == deg) break;
        deg = next;
    }
    return deg;
}

// --- subject -----------------------------------------------------------------

void save_subject(const Path& path, const SubjectModel& s) {
    std::string out = header("subject");
    out += "# lengths in meters, angles in degrees\n";
    out += "eye_center_left " + fmt_vec3(s.eyeball_center_left) + "\n";
    out += "eye_center_right " + fmt_vec3(s.eyeball_center_right) + "\n";
    out += "eyeball_radius " + fmt(s.eyeball_radius) + "\n";
    out += "kappa_left_deg " + fmt(rad_to_deg_file(s.kappa_left.x())) + " " +
           fmt(rad_to_deg_file(s.kappa_left.y())) + "\n";
    out += "kappa_right_deg " + fmt(rad_to_deg_file(s.kappa_right.x())) + " " +
           fmt(rad_to_deg_file(s.kappa_right.y())) + "\n";
    const auto cam_line = [](const std::string& key, const EyeCameraRig& rig) {
        return key + " " + fmt(rig.camera.fx) + " " + fmt(rig.camera.fy) + " " +
               fmt(rig.camera.cx) + " " + fmt(rig.camera.cy) + " " +
               std::to_string(rig.camera.width) + " " + std::to_string(rig.camera.height) +
               "\n" + key + "_pose " + fmt_pose(rig.head_to_cam) + "\n";
    };
    out += cam_line("eye_cam_left", s.eye_cam_left);
    out += cam_line("eye_cam_right", s.eye_cam_right);
    write_file(path, out);
}

SubjectModel load_subject(const Path& path) {
    SubjectModel s = SubjectModel::default_subject();
    for (const auto& line : data_lines(read_file(path), "subject", path)) {
        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        const std::string& key = toks[0];
        const auto need = [&](std::size_t n) {
            if (toks.size() != n + 1) {
                throw IoError(path.string() + ": '" + key + "' expects " + std::to_string(n) +
                              " values");
            }
        };
        if (key == "eye_center_left" || key == "eye_center_right") {
            need(3);
            const Vec3 v(parse_num(toks[1], path), parse_num(toks[2], path),
                         parse_num(toks[3], path));
            (key == "eye_center_left" ? s.eyeball_center_left : s.eyeball_center_right) = v;
        } else if (key == "eyeball_radius") {
            need(1);
            s.eyeball_radius = parse_num(toks[1], path);
        } else if (key == "kappa_left_deg" || key == "kappa_right_deg") {
            need(2);
            const Vec2 v(deg_to_rad_file(parse_num(toks[1], path)),
                         deg_to_rad_file(parse_num(toks[2], path)));
            (key == "kappa_left_deg" ? s.kappa_left : s.kappa_right) = v;
        } else if (key == "eye_cam_left" || key == "eye_cam_right") {
            need(6);
            const PinholeCamera cam(parse_num(toks[1], path), parse_num(toks[2], path),
                                    parse_num(toks[3], path), parse_num(toks[4], path),
                                    static_cast<int>(parse_num(toks[5], path)),
                                    static_cast<int>(parse_num(toks[6], path)));
            (key == "eye_cam_left" ? s.eye_cam_left : s.eye_cam_right).camera = cam;
        } else if (key == "eye_cam_left_pose") {
            s.eye_cam_left.head_to_cam = parse_pose(toks, 1, path);
        } else if (key == "eye_cam_right_pose") {
            s.eye_cam_right.head_to_cam = parse_pose(toks, 1, path);
        } else {
            throw IoError(path.string() + ": unknown subject key '" + key + "'");
        }
    }
    if (!(s.eyeball_radius > 0.0) ||
        (s.eyeball_center_left - s.eyeball_center_right).norm() <= 0.0) {
        throw IoError(path.string() + ": invalid subject geometry");
    }
    return s;
}

// --- scene ---------------------------------------------------------------------

void save_scene(const Path& path, const CalibrationSceneConfig& cfg) {
    std::string out = header("scene");
    out += "depths";
    for (double d : cfg.depths) out += " " + fmt(d);
    out += "\n";
    out += "lateral_angle_deg " + fmt(rad_to_deg_file(cfg.lateral_angle)) + "\n";
    out += "target_visual_angle_deg " + fmt(rad_to_deg_file(cfg.target_visual_angle)) + "\n";
    out += "dwell_seconds " + fmt(cfg.dwell_seconds) + "\n";
    out += "record_seconds " + fmt(cfg.record_seconds) + "\n";
    out += "sample_rate " + fmt(cfg.sample_rate) + "\n";
    write_file(path, out);
}

CalibrationSceneConfig load_scene(const Path& path) {
    CalibrationSceneConfig cfg;
    for (const auto& line : data_lines(read_file(path), "scene", path)) {
        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        const std::string& key = toks[0];
        if (key == "depths") {
            cfg.depths.clear();
            for (std::size_t i = 1; i < toks.size(); ++i) {
                cfg.depths.push_back(parse_num(toks[i], path));
            }
        } else if (toks.size() == 2 && key == "lateral_angle_deg") {
            cfg.lateral_angle = deg_to_rad_file(parse_num(toks[1], path));
        } else if (toks.size() == 2 && key == "target_visual_angle_deg") {
            cfg.target_visual_angle = deg_to_rad_file(parse_num(toks[1], path));
        } else if (toks.size() == 2 && key == "dwell_seconds") {
            cfg.dwell_seconds = parse_num(toks[1], path);
        } else if (toks.size() == 2 && key == "record_seconds") {
            cfg.record_seconds = parse_num(toks[1], path);
        } else if (toks.size() == 2 && key == "sample_rate") {
            cfg.sample_rate = parse_num(toks[1], path);
        } else {
            throw IoError(path.string() + ": unknown scene key '" + key + "'");
        }
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return cfg;
}

// --- fixation script -------------------------------------------------------------

void save_fixation_script(const Path& path, const std::vector<ScriptedFixation>& script) {
    std::string out = header("fixations");
    out += "# columns: duration_s x y z\n";
    for (const auto& f : script) {
        out += fmt(f.duration) + " " + fmt_vec3(f.point) + "\n";
    }
    write_file(path, out);
}

std::vector<ScriptedFixation> load_fixation_script(const Path& path) {
    std::vector<ScriptedFixation> out;
    for (const auto& line : data_lines(read_file(path), "fixations", path)) {
        const auto toks = split_ws(line);
        if (toks.size() != 4) throw IoError(path.string() + ": fixation lines need 4 numbers");
        out.push_back(ScriptedFixation{parse_num(toks[0], path),
                                       Vec3(parse_num(toks[1], path), parse_num(toks[2], path),
                                            parse_num(toks[3], path))});
    }
    return out;
}

// --- session script ---------------------------------------------------------------

void save_session_script(const Path& path, const SessionScript& script) {
    std::string out = header("session");
    out += "timeout " + fmt(script.timeout) + "\n";
    out += "waiting " + fmt(script.waiting_duration) + "\n";
    out += "repetitions " + std::to_string(script.repetitions) + "\n";
    for (const auto& c : script.commands) {
        out += "cmd " + fmt(c.issue_time) + " " + std::string(to_string(c.command)) + "\n";
    }
    write_file(path, out);
}

SessionScript load_session_script(const Path& path) {
    SessionScript script;
    for (const auto& line : data_lines(read_file(path), "session", path)) {
        const auto toks = split_ws(line);
        if (toks.size() == 2 && toks[0] == "timeout") {
            script.timeout = parse_num(toks[1], path);
        } else if (toks.size() == 2 && toks[0] == "waiting") {
            script.waiting_duration = parse_num(toks[1], path);
        } else if (toks.size() == 2 && toks[0] == "repetitions") {
            script.repetitions = static_cast<int>(parse_num(toks[1], path));
        } else if (toks.size() == 3 && toks[0] == "cmd") {
            SessionCommand cmd;
            if (toks[2] == "see_through_wall") {
                cmd = SessionCommand::SeeThroughWall;
            } else if (toks[2] == "see_wall") {
                cmd = SessionCommand::SeeWall;
            } else {
                throw IoError(path.string() + ": unknown command '" + toks[2] + "'");
            }
            script.commands.push_back(ScriptedCommand{parse_num(toks[1], path), cmd});
        } else {
            throw IoError(path.string() + ": bad session line '" + line + "'");
        }
    }
    try {
        script.validate();
    } catch (const ConfigError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return script;
}

// --- gaze stream --------------------------------------------------------------------

void save_stream(const Path& path, const GazeStream& stream) {
    std::string out = header("stream");
    out += "# columns: t plx ply plz prx pry prz pxlu pxlv pxru pxrv [fx fy fz depth]\n";
    for (const auto& s : stream.samples) {
        out += fmt(s.pair.timestamp) + " " + fmt_vec3(s.pair.p_left) + " " +
               fmt_vec3(s.pair.p_right) + " " + fmt(s.pair.px_left.x()) + " " +
               fmt(s.pair.px_left.y()) + " " + fmt(s.pair.px_right.x()) + " " +
               fmt(s.pair.px_right.y());
        if (s.truth_fixation && s.truth_depth) {
            out += " " + fmt_vec3(*s.truth_fixation) + " " + fmt(*s.truth_depth);
        }
        out += "\n";
    }
    write_file(path, out);
}

GazeStream load_stream(const Path& path) {
    GazeStream stream;
    double prev_t = -std::numeric_limits<double>::infinity();
    for (const auto& line : data_lines(read_file(path), "stream", path)) {
        const auto toks = split_ws(line);
        if (toks.size() != 11 && toks.size() != 15) {
            throw IoError(path.string() + ": stream lines need 11 or 15 numbers");
        }
        StreamSample s;
        s.pair.timestamp = parse_num(toks[0], path);
        s.pair.p_left = Vec3(parse_num(toks[1], path), parse_num(toks[2], path),
                             parse_num(toks[3], path));
        s.pair.p_right = Vec3(parse_num(toks[4], path), parse_num(toks[5], path),
                              parse_num(toks[6], path));
        s.pair.px_left = Vec2(parse_num(toks[7], path), parse_num(toks[8], path));
        s.pair.px_right = Vec2(parse_num(toks[9], path), parse_num(toks[10], path));
        if (toks.size() == 15) {
            s.truth_fixation = Vec3(parse_num(toks[11], path), parse_num(toks[12], path),
                                    parse_num(toks[13], path));
            s.truth_depth = parse_num(toks[14], path);
        }
        if (!(s.pair.timestamp > prev_t)) {
            throw IoError(path.string() + ": timestamps must strictly increase");
        }
        prev_t = s.pair.timestamp;
        stream.samples.push_back(std::move(s));
    }
    return stream;
}

// --- bundle --------------------------------------------------------------------------

namespace {

const char* units_name(IpdUnits u) { return u == IpdUnits::Millimeters ? "mm" : "px"; }

} // namespace

void save_bundle(const Path& path, const CalibrationBundle& bundle) {
    std::string out = header("bundle");
    if (bundle.kappa) {
        out += "kappa_deg " + fmt(rad_to_deg_file(bundle.kappa->left.x())) + " " +
               fmt(rad_to_deg_file(bundle.kappa->left.y())) + " " +
               fmt(rad_to_deg_file(bundle.kappa->right.x())) + " " +
               fmt(rad_to_deg_file(bundle.kappa->right.y())) + "\n";
        out += "kappa_residual_rad " + fmt(bundle.kappa_residual_rad) + "\n";
    }
    const auto write_reg = [&out](const SectoredRegression& reg) {
        out += "sector_boundaries_deg " + fmt(rad_to_deg_file(reg.boundaries[0])) + " " +
               fmt(rad_to_deg_file(reg.boundaries[1])) + "\n";
        for (std::size_t i = 0; i < 3; ++i) {
            const RegressionModel& m = reg.models[i];
            out += std::string("regression ") + units_name(m.units) + " " + std::to_string(i) +
                   " " + fmt(m.k1) + " " + fmt(m.k2) + " " + fmt(m.k3) + " " +
                   fmt(m.theta_bar) + "\n";
        }
    };
    if (bundle.mipd) write_reg(*bundle.mipd);
    if (bundle.pipd) write_reg(*bundle.pipd);
    if (bundle.thresholds) {
        for (const auto& b : bundle.thresholds->bins) {
            out += "delta_bin " + fmt(b.lo) + " " + fmt(b.hi) + " " + fmt(b.delta) + "\n";
        }
    }
    write_file(path, out);
}

CalibrationBundle load_bundle(const Path& path) {
    CalibrationBundle bundle;
    std::array<double, 2> boundaries = {-deg2rad(6.0), deg2rad(6.0)};
    std::vector<ThresholdBin> delta_bins;
    for (const auto& line : data_lines(read_file(path), "bundle", path)) {
        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        const std::string& key = toks[0];
        if (key == "kappa_deg" && toks.size() == 5) {
            KappaModel k;
            k.left = Vec2(deg_to_rad_file(parse_num(toks[1], path)),
                          deg_to_rad_file(parse_num(toks[2], path)));
            k.right = Vec2(deg_to_rad_file(parse_num(toks[3], path)),
                           deg_to_rad_file(parse_num(toks[4], path)));
            bundle.kappa = k;
        } else if (key == "kappa_residual_rad" && toks.size() == 2) {
            bundle.kappa_residual_rad = parse_num(toks[1], path);
        } else if (key == "sector_boundaries_deg" && toks.size() == 3) {
            boundaries = {deg_to_rad_file(parse_num(toks[1], path)),
                          deg_to_rad_file(parse_num(toks[2], path))};
        } else if (key == "regression" && toks.size() == 7) {
            IpdUnits units;
            if (toks[1] == "mm") {
                units = IpdUnits::Millimeters;
            } else if (toks[1] == "px") {
                units = IpdUnits::Pixels;
            } else {
                throw IoError(path.string() + ": unknown units '" + toks[1] + "'");
            }
            const int sector = static_cast<int>(parse_num(toks[2], path));
            if (sector < 0 || sector > 2) {
                throw IoError(path.string() + ": sector index out of range");
            }
            auto& slot = units == IpdUnits::Millimeters ? bundle.mipd : bundle.pipd;
            if (!slot) {
                SectoredRegression reg;
                reg.boundaries = boundaries;
                slot = reg;
            }
            RegressionModel m;
            m.k1 = parse_num(toks[3], path);
            m.k2 = parse_num(toks[4], path);
            m.k3 = parse_num(toks[5], path);
            m.theta_bar = parse_num(toks[6], path);
            m.units = units;
            slot->models[static_cast<std::size_t>(sector)] = m;
            slot->boundaries = boundaries;
        } else if (key == "delta_bin" && toks.size() == 4) {
            delta_bins.push_back(ThresholdBin{parse_num(toks[1], path),
                                              parse_num(toks[2], path),
                                              parse_num(toks[3], path)});
        } else {
            throw IoError(path.string() + ": bad bundle line '" + line + "'");
        }
    }
    if (!delta_bins.empty()) bundle.thresholds = ThresholdTable{std::move(delta_bins)};
    return bundle;
}

// --- events ----------------------------------------------------------------------------

void save_events(const Path& path, const std::vector<ControlEvent>& events) {
    std::string out = header("events");
    out += "# opened lines: t opened gamma px py pz [sx sy sz edge alpha]; closed lines: t "
           "closed\n";
    for (const auto& e : events) {
        if (e.kind == ControlEventKind::Opened) {
            out += fmt(e.t) + " opened " + fmt(e.gamma) + " " +
                   fmt_vec3(e.window_pose.value_or(Vec3::Zero()));
            if (e.stimulus) {
                out += " " + fmt_vec3(e.stimulus->position) + " " + fmt(e.stimulus->edge) +
                       " " + fmt(e.stimulus->alpha);
            }
            out += "\n";
        } else if (e.kind == ControlEventKind::Closed) {
            out += fmt(e.t) + " closed";
            if (e.stimulus) {
                out += " " + fmt_vec3(e.stimulus->position) + " " + fmt(e.stimulus->edge) +
                       " " + fmt(e.stimulus->alpha);
            }
            out += "\n";
        }
    }
    write_file(path, out);
}

std::vector<ControlEvent> load_events(const Path& path) {
    std::vector<ControlEvent> events;
    for (const auto& line : data_lines(read_file(path), "events", path)) {
        const auto toks = split_ws(line);
        if (toks.size() < 2) throw IoError(path.string() + ": bad event line '" + line + "'");
        ControlEvent e;
        e.t = parse_num(toks[0], path);
        std::size_t next = 2;
        if (toks[1] == "opened") {
            if (toks.size() < 6) throw IoError(path.string() + ": opened event needs a pose");
            e.kind = ControlEventKind::Opened;
            e.gamma = parse_num(toks[2], path);
            e.window_pose = Vec3(parse_num(toks[3], path), parse_num(toks[4], path),
                                 parse_num(toks[5], path));
            next = 6;
        } else if (toks[1] == "closed") {
            e.kind = ControlEventKind::Closed;
            e.gamma = kSentinelClosed;
        } else {
            throw IoError(path.string() + ": unknown event kind '" + toks[1] + "'");
        }
        if (toks.size() == next + 5) {
            e.stimulus = StimulusRecord{Vec3(parse_num(toks[next], path),
                                             parse_num(toks[next + 1], path),
                                             parse_num(toks[next + 2], path)),
                                        parse_num(toks[next + 3], path),
                                        parse_num(toks[next + 4], path)};
        } else if (toks.size() != next) {
            throw IoError(path.string() + ": bad event line '" + line + "'");
        }
        events.push_back(std::move(e));
    }
    return events;
}

// --- estimates ---------------------------------------------------------------------------

void save_estimates(const Path& path, const std::vector<EstimateRecord>& records) {
    std::string out = header("estimates");
    out += "t,depth,method,truth\n";
    for (const auto& r : records) {
        out += fmt(r.t) + "," + fmt(r.depth) + "," + r.method + ",";
        if (r.truth) out += fmt(*r.truth);
        out += "\n";
    }
    write_file(path, out);
}

std::vector<EstimateRecord> load_estimates(const Path& path) {
    const auto lines = data_lines(read_file(path), "estimates", path);
    std::vector<EstimateRecord> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i == 0 && lines[i].rfind("t,", 0) == 0) continue; // column header
        const auto cells = split_char(lines[i], ',');
        if (cells.size() != 4) throw IoError(path.string() + ": estimates rows need 4 cells");
        EstimateRecord r;
        r.t = parse_num(cells[0], path);
        r.depth = parse_num(cells[1], path);
        r.method = cells[2];
        if (!cells[3].empty()) r.truth = parse_num(cells[3], path);
        out.push_back(std::move(r));
    }
    return out;
}

void save_error_table(const Path& path, const ErrorTable& table) {
    std::string out = header("error-table");
    out += "bin_lo,bin_hi,mean_abs_error,stddev,n\n";
    for (const auto& b : table.bins) {
        out += fmt(b.lo) + "," + fmt(b.hi) + "," + fmt(b.mean_abs_error) + "," +
               fmt(b.stddev) + "," + std::to_string(b.n) + "\n";
    }
    write_file(path, out);
}

void save_session_metrics(const Path& path, const SessionMetrics& metrics) {
    std::string out = header("session-metrics");
    out += "metric,value\n";
    out += "successes," + std::to_string(metrics.successes) + "\n";
    out += "mistakes," + std::to_string(metrics.mistakes) + "\n";
    for (double t : metrics.completion_times) {
        out += "completion_time," + fmt(t) + "\n";
    }
    write_file(path, out);
}

// --- rig ---------------------------------------------------------------------------------

void save_rig(const Path& path, const RigSpec& rig) {
    std::string out = header("rig");
    out += "camera " + fmt(rig.camera.fx) + " " + fmt(rig.camera.fy) + " " + fmt(rig.camera.cx) +
           " " + fmt(rig.camera.cy) + " " + std::to_string(rig.camera.width) + " " +
           std::to_string(rig.camera.height) + "\n";
    out += "pose " + fmt_pose(rig.world_to_cam) + "\n";
    write_file(path, out);
}

RigSpec load_rig(const Path& path) {
    RigSpec rig;
    bool have_cam = false, have_pose = false;
    for (const auto& line : data_lines(read_file(path), "rig", path)) {
        const auto toks = split_ws(line);
        if (!toks.empty() && toks[0] == "camera" && toks.size() == 7) {
            rig.camera = PinholeCamera(parse_num(toks[1], path), parse_num(toks[2], path),
                                       parse_num(toks[3], path), parse_num(toks[4], path),
                                       static_cast<int>(parse_num(toks[5], path)),
                                       static_cast<int>(parse_num(toks[6], path)));
            have_cam = true;
        } else if (!toks.empty() && toks[0] == "pose") {
            rig.world_to_cam = parse_pose(toks, 1, path);
            have_pose = true;
        } else {
            throw IoError(path.string() + ": bad rig line '" + line + "'");
        }
    }
    if (!have_cam || !have_pose) throw IoError(path.string() + ": rig needs camera and pose");
    return rig;
}

// --- images ------------------------------------------------------------------------------

void save_image(const Path& path, const RasterImage& image) {
    if (image.channels != 1 && image.channels != 3) {
        throw ConfigError("save_image: only 1- or 3-channel images");
    }
    std::string out = image.channels == 3 ? "P6\n" : "P5\n";
    out += std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(image.data.data()), image.data.size());
    write_file(path, out);
}

namespace {

int next_pnm_int(const std::string& content, std::size_t& pos, const Path& path) {
    // Skip whitespace and '#' comments.
    while (pos < content.size()) {
        const char c = content[pos];
        if (c == '#') {
            while (pos < content.size() && content[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    std::size_t start = pos;
    while (pos < content.size() && std::isdigit(static_cast<unsigned char>(content[pos]))) {
        ++pos;
    }
    if (start == pos || pos - start > 9) {
        throw IoError(path.string() + ": malformed PNM header");
    }
    return std::stoi(content.substr(start, pos - start));
}

} // namespace

RasterImage load_image(const Path& path) {
    const std::string content = read_file(path);
    if (content.size() < 2) throw IoError(path.string() + ": not a PNM file");
    int channels = 0;
    if (content[0] == 'P' && content[1] == '6') {
        channels = 3;
    } else if (content[0] == 'P' && content[1] == '5') {
        channels = 1;
    } else {
        throw IoError(path.string() + ": only binary PPM (P6) and PGM (P5) are supported");
    }
    std::size_t pos = 2;
    const int width = next_pnm_int(content, pos, path);
    const int height = next_pnm_int(content, pos, path);
    const int maxval = next_pnm_int(content, pos, path);
    if (width <= 0 || height <= 0) throw IoError(path.string() + ": bad PNM dimensions");
    if (maxval != 255) throw IoError(path.string() + ": only maxval 255 is supported");
    pos += 1; // single whitespace byte after maxval
    const std::size_t need = static_cast<std::size_t>(width) *
                             static_cast<std::size_t>(height) *
                             static_cast<std::size_t>(channels);
    if (pos > content.size() || content.size() - pos < need) {
        throw IoError(path.string() + ": truncated PNM payload");
    }
    RasterImage img(width, height, channels);
    std::copy_n(reinterpret_cast<const std::uint8_t*>(content.data()) + pos, need,
                img.data.begin());
    return img;
}

} // namespace vergekit::io
