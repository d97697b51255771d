// tlssc: trajectory preprocessing, quality assessment, FVDM simulation and
// DIRECT calibration for ADAS interaction with traffic control devices.
//
// Segment files are delimited text with the standard column names (Time,
// Longitude, Latitude, Speed and the _smoothed/_lead variants). Behavior
// and speed setting are read from the filename where applicable:
//   <behavior-token>__<NN>mph__<name>.csv   (e.g. follow-4__40mph__run1.csv)
// Stop-line and timing annotations live in a sibling .ann file with
// "key = value" lines.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tlssc/behavior.hpp"
#include "tlssc/calibration.hpp"
#include "tlssc/direct.hpp"
#include "tlssc/fvdm.hpp"
#include "tlssc/quality.hpp"
#include "tlssc/report.hpp"
#include "tlssc/synth.hpp"
#include "tlssc/threshold.hpp"
#include "tlssc/units.hpp"

namespace fs = std::filesystem;
using namespace tlssc;

namespace {

struct CommonFlags {
    double dt = 0.1;
    int budget = 2000;
    double epsilon = 1e-4;
    double threshold_m = kCarFollowingThresholdM;
    bool threshold_exclusive = false;
    double gap_max_s = 1.0;
    double window_s = 1.0;
    unsigned long long seed = 0;
    std::string bounds;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--dt", f.dt, "Integration / sampling step in seconds")->capture_default_str();
    cmd->add_option("--budget", f.budget, "Optimizer evaluation budget")->capture_default_str();
    cmd->add_option("--epsilon", f.epsilon, "DIRECT potential-optimality slack")->capture_default_str();
    cmd->add_option("--threshold-m", f.threshold_m, "Car-following detection threshold in meters")
        ->capture_default_str();
    cmd->add_flag("--threshold-exclusive", f.threshold_exclusive,
                  "Treat a lead exactly at the threshold as undetected");
    cmd->add_option("--gap-max-s", f.gap_max_s, "Largest gap bridged by interpolation, seconds")
        ->capture_default_str();
    cmd->add_option("--window-s", f.window_s, "Moving-average window in seconds")->capture_default_str();
    cmd->add_option("--seed", f.seed, "RNG seed for synthetic noise")->capture_default_str();
    cmd->add_option("--bounds", f.bounds,
                    "Calibration box as a_lo:a_hi,b_lo:b_hi,s0_lo:s0_hi,ds_lo:ds_hi");
}

std::vector<std::pair<double, double>> parse_bounds(const std::string& spec) {
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw DataError("bad --bounds element: " + item);
        out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    }
    if (out.size() != 4) throw DataError("--bounds needs exactly 4 lo:hi pairs");
    return out;
}

std::vector<std::string> meta_lines(const std::string& subcommand, const CommonFlags& f) {
    std::ostringstream m;
    m << "tlssc " << subcommand << " dt=" << f.dt << " budget=" << f.budget << " epsilon=" << f.epsilon
      << " threshold_m=" << f.threshold_m << " gap_max_s=" << f.gap_max_s << " window_s=" << f.window_s
      << " seed=" << f.seed;
    return {m.str()};
}

TrajectorySegment load_segment(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    auto seg = parse_segment(in);
    seg.id = path.filename().string();
    std::string name = path.stem().string();
    auto sep = name.find("__");
    if (sep != std::string::npos) {
        try {
            seg.behavior = parse_behavior_token(name.substr(0, sep));
        } catch (const DataError&) {
            // filename does not follow the token convention; keep defaults
        }
    }
    auto mph = name.find("mph");
    if (mph != std::string::npos) {
        std::size_t start = mph;
        while (start > 0 && std::isdigit(static_cast<unsigned char>(name[start - 1]))) --start;
        if (start < mph) seg.desired_speed = mph_to_mps(std::stod(name.substr(start, mph - start)));
    }
    fs::path ann_path = path;
    ann_path.replace_extension(".ann");
    if (fs::exists(ann_path)) {
        std::ifstream ain(ann_path);
        seg.annotation = parse_annotation(ain);
    }
    return seg;
}

std::vector<TrajectorySegment> load_directory(const std::string& dir) {
    std::vector<fs::path> paths;
    if (fs::is_regular_file(dir)) {
        paths.push_back(dir);
    } else {
        for (const auto& e : fs::recursive_directory_iterator(dir))
            if (e.is_regular_file() && e.path().extension() == ".csv") paths.push_back(e.path());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<TrajectorySegment> segs;
    for (const auto& p : paths) segs.push_back(load_segment(p));
    return segs;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw DataError("cannot open output " + path);
    return file;
}

TrajectorySegment series_to_segment(const LongitudinalSeries& s) {
    TrajectorySegment seg;
    seg.tz_offset_minutes = kSynthTzOffsetMin;
    double t0 = synth_epoch0();
    for (std::size_t i = 0; i < s.size(); ++i) {
        TrajectoryPoint p;
        p.t = t0 + (s.t[i] - s.t.front());
        p.lat = synth_lat_at(s.position[i]);
        p.lon = kSynthOriginLon;
        p.speed = s.speed[i];
        if (s.has_leader()) {
            p.lead_lat = synth_lat_at(s.lead_position[i]);
            p.lead_lon = kSynthOriginLon;
            p.lead_speed = s.lead_speed[i];
        }
        seg.points.push_back(p);
    }
    return seg;
}

int window_samples(const CommonFlags& f) {
    return std::max(1, static_cast<int>(std::lround(f.window_s / f.dt)));
}

// --- subcommand bodies ----------------------------------------------------

int cmd_smooth(const std::string& in_path, const std::string& out_path, const CommonFlags& f) {
    auto seg = load_segment(in_path);
    auto interp = interpolate_gaps(seg, f.gap_max_s);
    for (const auto& g : interp.oversized_gaps)
        std::cerr << "oversized gap: " << format_iso8601(g.t_before, seg.tz_offset_minutes) << " .. "
                  << format_iso8601(g.t_after, seg.tz_offset_minutes) << " (" << g.length() << " s)\n";
    int part = 0;
    for (auto& piece : interp.segments) {
        auto smoothed = smooth_segment(piece, window_samples(f));
        auto series = project_to_path(smoothed);
        std::string path = out_path;
        if (interp.segments.size() > 1 && !path.empty() && path != "-")
            path += ".part" + std::to_string(part++);
        std::ofstream file;
        serialize_segment(smoothed, open_output(file, path), &series, meta_lines("smooth", f));
    }
    return interp.oversized_gaps.empty() ? 0 : 2;
}

int cmd_assess(const std::string& dir, const std::string& out_path, const CommonFlags& f) {
    auto segs = load_directory(dir);
    std::vector<QualityReport> reports;
    for (auto g : {BehaviorGroup::Stopping, BehaviorGroup::Accelerating, BehaviorGroup::CarFollowing,
                   BehaviorGroup::All}) {
        try {
            reports.push_back(summarize(segs, g, window_samples(f)));
        } catch (const DataError&) {
            // group absent from this directory
        }
    }
    if (reports.empty()) throw DataError("no segments found under " + dir);
    std::ofstream file;
    auto& out = open_output(file, out_path);
    for (const auto& m : meta_lines("assess", f)) out << "# " << m << "\n";
    out << format_quality_table(reports) << "\n" << format_structured({}, reports);
    return 0;
}

int cmd_simulate(const FvdmParams& params, const std::string& leader_spec, double init_v, double horizon,
                 const std::string& out_path, const CommonFlags& f) {
    LeaderSpec leader;
    if (leader_spec == "free") {
        leader = VirtualFree{};
    } else if (leader_spec.rfind("stopped:", 0) == 0) {
        leader = VirtualStopped{std::stod(leader_spec.substr(8))};
    } else if (leader_spec.rfind("recorded:", 0) == 0) {
        auto seg = load_segment(leader_spec.substr(9));
        auto series = project_to_path(seg, SpeedChannel::Raw);
        RecordedLeader rec;
        rec.t = series.t;
        // the recorded *leader* channel when present, else the follower channel
        rec.position = series.has_leader() ? series.lead_position : series.position;
        rec.speed = series.has_leader() ? series.lead_speed : series.speed;
        for (auto& t : rec.t) t -= series.t.front();
        leader = std::move(rec);
    } else {
        throw DataError("--leader must be free, stopped:<x>, or recorded:<file>");
    }
    auto sim = simulate({0, 0, init_v}, leader, params, f.dt, horizon);
    if (sim.collision)
        std::cerr << "virtual collision at t=" << sim.collision_t << "; simulation halted\n";
    auto seg = series_to_segment(sim.series);
    std::ofstream file;
    serialize_segment(seg, open_output(file, out_path), &sim.series, meta_lines("simulate", f));
    return sim.collision ? 2 : 0;
}

int cmd_calibrate(const std::string& dir, const std::string& group_token, const std::string& out_path,
                  const CommonFlags& f) {
    auto all = load_directory(dir);
    CalibrationProblem prob;
    std::string behavior_name;
    if (group_token == "stopping" || group_token == "accelerating" || group_token == "car-following") {
        BehaviorGroup g = group_token == "stopping" ? BehaviorGroup::Stopping
                          : group_token == "accelerating" ? BehaviorGroup::Accelerating
                                                          : BehaviorGroup::CarFollowing;
        for (const auto& s : all)
            if (in_group(s.behavior, g)) prob.segments.push_back(s);
        behavior_name = to_string(g);
    } else {
        auto label = parse_behavior_token(group_token);
        for (const auto& s : all)
            if (s.behavior.kind == label.kind && s.behavior.gap_level == label.gap_level)
                prob.segments.push_back(s);
        behavior_name = to_string(label);
    }
    if (prob.segments.empty()) throw DataError("no segments match group '" + group_token + "'");
    prob.optimizer.max_evals = f.budget;
    prob.optimizer.epsilon = f.epsilon;
    prob.dt = f.dt;
    if (!f.bounds.empty()) prob.bounds = parse_bounds(f.bounds);
    auto res = calibrate(prob);
    std::vector<CalibrationRow> rows = {{behavior_name, res}};
    std::ofstream file;
    auto& out = open_output(file, out_path);
    for (const auto& m : meta_lines("calibrate", f)) out << "# " << m << "\n";
    out << format_calibration_table(rows) << "\n" << format_structured(rows, {});
    return 0;
}

int cmd_threshold(double lead_distance, double desired_mph, double stopline_m, double horizon,
                  const std::string& out_path, const CommonFlags& f) {
    ThresholdReplayConfig cfg;
    cfg.activation_distance_m = lead_distance;
    cfg.desired_speed = mph_to_mps(desired_mph);
    cfg.x_stopline_m = stopline_m;
    cfg.threshold_m = f.threshold_m;
    cfg.threshold_inclusive = !f.threshold_exclusive;
    cfg.dt = f.dt;
    cfg.horizon_s = horizon;
    auto rep = replay_threshold(cfg);
    std::ofstream file;
    auto& out = open_output(file, out_path);
    for (const auto& m : meta_lines("threshold", f)) out << "# " << m << "\n";
    out << "# mode = " << (rep.decision.mode == Mode::Following ? "Following" : "PermissionStopping")
        << "\n";
    out << "t_s,gap_headway_m,time_headway_s,speed_mps\n";
    for (std::size_t i = 0; i < rep.sim.series.size(); ++i)
        out << rep.sim.series.t[i] << ',' << rep.sim.series.spacing[i] << ',' << rep.time_headway[i]
            << ',' << rep.sim.series.speed[i] << "\n";
    return 0;
}

int cmd_synth(const std::string& mode, const FvdmParams& params, const std::string& waypoints_mph,
              double approach_mps, double stopline_m, double noise_std, const std::string& out_path,
              const CommonFlags& f) {
    SynthOptions opt;
    opt.dt = f.dt;
    opt.noise_std = noise_std;
    opt.seed = f.seed;
    if (mode == "following") {
        std::vector<double> waypoints;
        std::stringstream ss(waypoints_mph);
        std::string item;
        while (std::getline(ss, item, ',')) waypoints.push_back(mph_to_mps(std::stod(item)));
        auto seg = synth_oscillation(params, waypoints, opt);
        std::ofstream file;
        serialize_segment(seg, open_output(file, out_path), nullptr, meta_lines("synth", f));
    } else if (mode == "stopping") {
        auto fx = synth_stopping(params, approach_mps, stopline_m, 60.0, opt);
        std::ofstream file;
        serialize_segment(fx.segment, open_output(file, out_path), nullptr, meta_lines("synth", f));
        if (!out_path.empty() && out_path != "-") {
            fs::path ann_path = out_path;
            ann_path.replace_extension(".ann");
            std::ofstream ann(ann_path);
            serialize_annotation(fx.annotation, ann, kSynthTzOffsetMin);
        }
    } else {
        throw DataError("--mode must be following or stopping");
    }
    return 0;
}

// Re-renders structured [calibration]/[quality] records into tables.
int cmd_report(const std::vector<std::string>& inputs, const std::string& out_path,
               const CommonFlags& f) {
    std::vector<CalibrationRow> rows;
    std::vector<QualityReport> quality;
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open " + path);
        std::string line, section;
        CalibrationRow row;
        QualityReport q;
        auto flush = [&]() {
            if (section == "calibration") rows.push_back(row);
            if (section == "quality") quality.push_back(q);
            section.clear();
            row = {};
            q = {};
        };
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (line[0] == '[') {
                flush();
                section = line.substr(1, line.find(']') - 1);
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos || section.empty()) continue;
            std::string key = line.substr(0, eq), val = line.substr(eq + 1);
            key.erase(key.find_last_not_of(" \t") + 1);
            val.erase(0, val.find_first_not_of(" \t"));
            if (section == "calibration") {
                if (key == "behavior") row.behavior = val;
                else if (key == "alpha") row.result.params.alpha = std::stod(val);
                else if (key == "beta") row.result.params.beta = std::stod(val);
                else if (key == "s0") row.result.params.s0 = std::stod(val);
                else if (key == "delta_s") row.result.params.delta_s = std::stod(val);
                else if (key == "v_max") row.result.params.v_max = std::stod(val);
                else if (key == "rmse") row.result.rmse = std::stod(val);
                else if (key == "evals") row.result.evals = std::stoi(val);
            } else if (section == "quality") {
                if (key == "group") q.group = val;
                else if (key == "segments") q.segment_count = std::stoul(val);
                else if (key == "distance_m") q.distance_m = std::stod(val);
                else if (key == "duration_s") q.duration_s = std::stod(val);
                else if (key == "anomaly_accel_pct_raw") q.anomaly_accel_pct_raw = std::stod(val);
                else if (key == "anomaly_accel_pct_smoothed") q.anomaly_accel_pct_smoothed = std::stod(val);
                else if (key == "anomaly_jerk_pct_raw") q.anomaly_jerk_pct_raw = std::stod(val);
                else if (key == "anomaly_jerk_pct_smoothed") q.anomaly_jerk_pct_smoothed = std::stod(val);
            }
        }
        flush();
    }
    if (rows.empty() && quality.empty()) throw DataError("no structured records found in inputs");
    std::ofstream file;
    auto& out = open_output(file, out_path);
    for (const auto& m : meta_lines("report", f)) out << "# " << m << "\n";
    if (!rows.empty()) out << format_calibration_table(rows) << "\n";
    if (!quality.empty()) out << format_quality_table(quality);
    return 0;
}

int cmd_opt_selftest(const CommonFlags& f) {
    Objective quad = [](const std::vector<double>& x) {
        double s = 0;
        for (double xi : x) s += (xi - 0.3) * (xi - 0.3);
        return s;
    };
    OptimizerConfig cfg;
    cfg.max_evals = f.budget;
    cfg.epsilon = f.epsilon;
    auto r = minimize(quad, {{0, 1}, {0, 1}}, cfg);
    bool ok = r.f <= 1e-4;
    std::cout << "quadratic2d f_best=" << r.f << " evals=" << r.evals << (ok ? " ok" : " FAIL") << "\n";

    Objective multi = [](const std::vector<double>& x) {
        double s = 0;
        for (double xi : x) s += std::sin(5 * xi) + (xi - 0.5) * (xi - 0.5);
        return s;
    };
    auto r1 = minimize(multi, {{0, 5}, {0, 5}, {0, 10}, {0.1, 20}}, cfg);
    auto r2 = minimize(multi, {{0, 5}, {0, 5}, {0, 10}, {0.1, 20}}, cfg);
    bool det = r1.x == r2.x && r1.f == r2.f && r1.evals == r2.evals;
    std::cout << "multimodal4d f_best=" << r1.f << " evals=" << r1.evals
              << (det ? " deterministic" : " NONDETERMINISTIC") << "\n";
    return ok && det ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FVDM-based modeling toolkit for ADAS interaction with traffic control devices"};
    app.require_subcommand(1);
    CommonFlags flags;

    std::string in_path, out_path, dir, group = "stopping", leader_spec = "free";
    std::string synth_mode = "following", waypoints_mph = "40,30,20,30,40";
    std::vector<std::string> report_inputs;
    double alpha = 0.7510, beta = 0.8127, s0 = 5.5761, delta_s = 18.9590, vmax_mph = 40.0;
    double init_v = 0.0, horizon = 60.0, lead_distance = 40.0, stopline_m = 200.0;
    double approach_mps = 15.0, noise_std = 0.0;

    auto* smooth = app.add_subcommand("smooth", "Interpolate gaps, smooth, append derived columns");
    smooth->add_option("--input", in_path)->required();
    smooth->add_option("--output", out_path);
    add_common(smooth, flags);

    auto* assess = app.add_subcommand("assess", "Quality summary over a directory of segments");
    assess->add_option("--input", dir)->required();
    assess->add_option("--output", out_path);
    add_common(assess, flags);

    auto* simulate_cmd = app.add_subcommand("simulate", "Forward FVDM simulation");
    simulate_cmd->add_option("--alpha", alpha)->capture_default_str();
    simulate_cmd->add_option("--beta", beta)->capture_default_str();
    simulate_cmd->add_option("--s0", s0)->capture_default_str();
    simulate_cmd->add_option("--delta-s", delta_s)->capture_default_str();
    simulate_cmd->add_option("--vmax-mph", vmax_mph)->capture_default_str();
    simulate_cmd->add_option("--leader", leader_spec, "free | stopped:<x_m> | recorded:<file>")
        ->capture_default_str();
    simulate_cmd->add_option("--init-v", init_v, "Initial speed, m/s")->capture_default_str();
    simulate_cmd->add_option("--horizon", horizon, "Seconds")->capture_default_str();
    simulate_cmd->add_option("--output", out_path);
    add_common(simulate_cmd, flags);

    auto* calibrate_cmd = app.add_subcommand("calibrate", "DIRECT calibration of a behavior group");
    calibrate_cmd->add_option("--input", dir, "Directory of segment (+.ann) files")->required();
    calibrate_cmd
        ->add_option("--group", group,
                     "stopping | accelerating | car-following | a behavior token (e.g. follow-4)")
        ->capture_default_str();
    calibrate_cmd->add_option("--output", out_path);
    add_common(calibrate_cmd, flags);

    auto* threshold_cmd = app.add_subcommand("threshold", "Replay a lead-activation trial");
    threshold_cmd->add_option("--lead-distance", lead_distance, "Activation distance, m")
        ->capture_default_str();
    threshold_cmd->add_option("--desired-mph", vmax_mph)->capture_default_str();
    threshold_cmd->add_option("--stopline-m", stopline_m)->capture_default_str();
    threshold_cmd->add_option("--horizon", horizon)->capture_default_str();
    threshold_cmd->add_option("--output", out_path);
    add_common(threshold_cmd, flags);

    auto* synth = app.add_subcommand("synth", "Generate synthetic ground-truth fixtures");
    synth->add_option("--mode", synth_mode, "following | stopping")->capture_default_str();
    synth->add_option("--alpha", alpha)->capture_default_str();
    synth->add_option("--beta", beta)->capture_default_str();
    synth->add_option("--s0", s0)->capture_default_str();
    synth->add_option("--delta-s", delta_s)->capture_default_str();
    synth->add_option("--vmax-mph", vmax_mph)->capture_default_str();
    synth->add_option("--waypoints-mph", waypoints_mph, "Leader speed waypoints")->capture_default_str();
    synth->add_option("--approach-mps", approach_mps, "Stopping-mode approach speed")
        ->capture_default_str();
    synth->add_option("--stopline-m", stopline_m)->capture_default_str();
    synth->add_option("--noise-std", noise_std, "Gaussian speed noise, m/s")->capture_default_str();
    synth->add_option("--output", out_path);
    add_common(synth, flags);

    auto* report_cmd = app.add_subcommand("report", "Render structured results as tables");
    report_cmd->add_option("--input", report_inputs, "Structured record files")->required();
    report_cmd->add_option("--output", out_path);
    add_common(report_cmd, flags);

    auto* selftest = app.add_subcommand("opt-selftest", "Optimizer oracle self-checks");
    add_common(selftest, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        FvdmParams params{alpha, beta, s0, delta_s, mph_to_mps(vmax_mph)};
        if (smooth->parsed()) return cmd_smooth(in_path, out_path, flags);
        if (assess->parsed()) return cmd_assess(dir, out_path, flags);
        if (simulate_cmd->parsed())
            return cmd_simulate(params, leader_spec, init_v, horizon, out_path, flags);
        if (calibrate_cmd->parsed()) return cmd_calibrate(dir, group, out_path, flags);
        if (threshold_cmd->parsed())
            return cmd_threshold(lead_distance, vmax_mph, stopline_m, horizon, out_path, flags);
        if (synth->parsed())
            return cmd_synth(synth_mode, params, waypoints_mph, approach_mps, stopline_m, noise_std,
                             out_path, flags);
        if (report_cmd->parsed()) return cmd_report(report_inputs, out_path, flags);
        if (selftest->parsed()) return cmd_opt_selftest(flags);
    } catch (const std::exception& e) {
        const char* kind = "error";
        if (dynamic_cast<const SchemaError*>(&e)) kind = "schema";
        else if (dynamic_cast<const RowError*>(&e)) kind = "row";
        else if (dynamic_cast<const StructuralError*>(&e)) kind = "structure";
        else if (dynamic_cast<const DataError*>(&e)) kind = "data";
        else if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) kind = "io";
        std::cerr << "[error]\nkind = " << kind << "\nmessage = " << e.what() << "\n";
        return 1;
    }
    return 0;
}
