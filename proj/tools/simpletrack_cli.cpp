// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

// Command-line front end: track, eval, synth, bench, interp and replay.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "simpletrack/simpletrack.hpp"

namespace fs = std::filesystem;
namespace st = simpletrack;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

// Thrown for invalid flag combinations detected after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt_fixed(double v, int decimals) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Run manifests

struct Manifest {
    std::string command;
    std::vector<std::string> arguments;  // replayable argv, subcommand first
    json config = nullptr;
    json inputs = json::object();
    json outputs = json::object();
    json seed = nullptr;
};

void write_manifest(const fs::path& path, const Manifest& m) {
    json j;
    j["tool"] = "simpletrack";
    j["version"] = st::kVersion;
    j["command"] = m.command;
    j["arguments"] = m.arguments;
    j["config"] = m.config;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    j["seed"] = m.seed;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw st::Error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

fs::path manifest_path_for(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

json config_json(const st::TrackerConfig& c) {
    json j;
    j["tau_high"] = c.tau_high;
    j["tau_low"] = c.tau_low;
    j["eps_init"] = c.eps_init;
    j["eps_retrieval"] = c.eps_retrieval;
    j["lambda1"] = c.lambda1;
    j["lambda2"] = c.lambda2;
    j["match_thresh_high"] = c.match_thresh_high;
    j["match_thresh_low"] = c.match_thresh_low;
    j["max_time_lost"] = c.max_time_lost;
    j["ema_alpha"] = c.ema_alpha;
    j["strategy"] = std::string(st::to_string(c.strategy));
    j["retrieval_enabled"] = c.retrieval_enabled;
    j["em_weight"] = c.em_weight;
    j["em_gate"] = c.em_gate;
    j["jde_iou_thresh"] = c.jde_iou_thresh;
    return j;
}

std::vector<std::string> config_arguments(const st::TrackerConfig& c) {
    return {"--strategy",          std::string(st::to_string(c.strategy)),
            "--tau-high",          fmt(c.tau_high),
            "--tau-low",           fmt(c.tau_low),
            "--eps-init",          fmt(c.eps_init),
            "--eps-retrieval",     fmt(c.eps_retrieval),
            "--lambda1",           fmt(c.lambda1),
            "--lambda2",           fmt(c.lambda2),
            "--match-thresh-high", fmt(c.match_thresh_high),
            "--match-thresh-low",  fmt(c.match_thresh_low),
            "--max-time-lost",     std::to_string(c.max_time_lost),
            "--ema-alpha",         fmt(c.ema_alpha),
            "--retrieval-enabled", c.retrieval_enabled ? "true" : "false",
            "--em-weight",         fmt(c.em_weight),
            "--em-gate",           fmt(c.em_gate),
            "--jde-iou-thresh",    fmt(c.jde_iou_thresh)};
}

// ---------------------------------------------------------------------------
// track

// Serves grids of ascending frames from a sidecar, tolerating frames without
// a grid record.
class GridStream {
public:
    explicit GridStream(const fs::path& path) : reader_(path) { pending_ = reader_.next(); }

    std::optional<st::EmbeddingGrid> at(std::int64_t frame) {
        while (pending_ && pending_->frame < frame) pending_ = reader_.next();
        if (!pending_ || pending_->frame != frame) return std::nullopt;
        auto grid = std::move(pending_->grid);
        pending_ = reader_.next();
        return grid;
    }

private:
    st::GridReader reader_;
    std::optional<st::GridReader::Entry> pending_;
};

void track_sequence(const fs::path& dets, const std::optional<fs::path>& grid, const st::TrackerConfig& config,
                    const fs::path& out) {
    auto seq = st::read_detections(dets);
    st::Tracker tracker(config);
    std::optional<GridStream> grids;
    if (grid) grids.emplace(*grid);
    std::vector<st::ResultRecord> records;
    for (auto& frame : seq.frames) {
        if (grids) frame.grid = grids->at(frame.frame);
        for (const auto& o : tracker.update(frame)) records.push_back({frame.frame, o.id, o.box, o.score});
        frame.grid.reset();
    }
    st::write_results(out, records);
}

struct TrackOptions {
    st::TrackerConfig config;
    std::string strategy = "simpletrack";
    std::string dets;
    std::string grid;
    std::string out;
    std::vector<std::string> seqs;
    std::string out_dir;
    unsigned jobs = 1;
};

void add_config_flags(CLI::App* cmd, TrackOptions& o) {
    auto& c = o.config;
    cmd->add_option("--strategy", o.strategy, "Association strategy")
        ->check(CLI::IsMember({"simpletrack", "byte", "jde"}))
        ->capture_default_str();
    cmd->add_option("--tau-high", c.tau_high, "Confident detections: score > tau-high")->capture_default_str();
    cmd->add_option("--tau-low", c.tau_low, "Second-stage detections: tau-low < score <= tau-high")
        ->capture_default_str();
    cmd->add_option("--eps-init", c.eps_init, "Minimum score to start a track")->capture_default_str();
    cmd->add_option("--eps-retrieval", c.eps_retrieval, "Cosine distance accepted by retrieval")
        ->capture_default_str();
    cmd->add_option("--lambda1", c.lambda1, "Appearance weight of the EG cost")->capture_default_str();
    cmd->add_option("--lambda2", c.lambda2, "GIoU weight of the EG cost")->capture_default_str();
    cmd->add_option("--match-thresh-high", c.match_thresh_high, "Maximum cost in the first association")
        ->capture_default_str();
    cmd->add_option("--match-thresh-low", c.match_thresh_low, "Maximum cost in the second association")
        ->capture_default_str();
    cmd->add_option("--max-time-lost", c.max_time_lost, "Frames a lost track is kept")->capture_default_str();
    cmd->add_option("--ema-alpha", c.ema_alpha, "Embedding memory momentum")->capture_default_str();
    cmd->add_option("--retrieval-enabled", c.retrieval_enabled, "Probe the embedding grid for lost tracks")
        ->capture_default_str();
    cmd->add_option("--em-weight", c.em_weight, "Appearance weight of the EM cost (jde)")->capture_default_str();
    cmd->add_option("--em-gate", c.em_gate, "Mahalanobis gate of the EM cost (jde)")->capture_default_str();
    cmd->add_option("--jde-iou-thresh", c.jde_iou_thresh, "Maximum 1-IoU in the second association (jde)")
        ->capture_default_str();
}

int run_track(TrackOptions& o) {
    o.config.strategy = st::parse_strategy(o.strategy);
    o.config.validate();
    const bool single = !o.dets.empty();
    if (single == !o.seqs.empty()) throw UsageError("track needs either --dets or --seqs");
    if (single && o.out.empty()) throw UsageError("--dets requires --out");
    if (!single && o.out_dir.empty()) throw UsageError("--seqs requires --out-dir");
    if (single && !o.out_dir.empty()) throw UsageError("--out-dir is only used with --seqs");
    if (!single && (!o.out.empty() || !o.grid.empty())) throw UsageError("--out and --grid are only used with --dets");
    if (o.jobs < 1) throw UsageError("--jobs must be >= 1");

    const bool uses_grid = o.config.strategy == st::Strategy::SimpleTrack;
    Manifest m;
    m.command = "track";
    m.config = config_json(o.config);

    if (single) {
        std::optional<fs::path> grid;
        if (!o.grid.empty()) {
            if (uses_grid) {
                grid = o.grid;
            } else {
                st::log_warning("--grid is ignored by strategy '" + o.strategy + "'");
            }
        }
        track_sequence(o.dets, grid, o.config, o.out);
        m.arguments = {"track", "--dets", o.dets};
        if (!o.grid.empty()) m.arguments.insert(m.arguments.end(), {"--grid", o.grid});
        m.arguments.insert(m.arguments.end(), {"--out", o.out});
        const auto flags = config_arguments(o.config);
        m.arguments.insert(m.arguments.end(), flags.begin(), flags.end());
        m.inputs["dets"] = o.dets;
        m.inputs["grid"] = o.grid.empty() ? json(nullptr) : json(o.grid);
        m.outputs["out"] = o.out;
        write_manifest(manifest_path_for(o.out), m);
        return kOk;
    }

    if (!uses_grid) {
        for (const auto& s : o.seqs) {
            if (fs::exists(fs::path(s) / "grid.bin")) {
                st::log_warning("grid sidecars are ignored by strategy '" + o.strategy + "'");
                break;
            }
        }
    }
    std::set<std::string> names;
    for (const auto& s : o.seqs) {
        if (!names.insert(fs::path(s).lexically_normal().filename().string()).second) {
            throw UsageError("sequence directories must have distinct names: " + s);
        }
    }
    std::vector<std::exception_ptr> errors(o.seqs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < o.seqs.size(); i = next++) {
            try {
                const fs::path dir = fs::path(o.seqs[i]).lexically_normal();
                std::optional<fs::path> grid;
                if (uses_grid && fs::exists(dir / "grid.bin")) grid = dir / "grid.bin";
                track_sequence(dir / "dets.txt", grid, o.config, fs::path(o.out_dir) / (dir.filename().string() + ".txt"));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::min<unsigned>(o.jobs, static_cast<unsigned>(o.seqs.size()));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < workers; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    m.arguments = {"track", "--seqs"};
    m.arguments.insert(m.arguments.end(), o.seqs.begin(), o.seqs.end());
    m.arguments.insert(m.arguments.end(), {"--out-dir", o.out_dir, "--jobs", std::to_string(o.jobs)});
    const auto flags = config_arguments(o.config);
    m.arguments.insert(m.arguments.end(), flags.begin(), flags.end());
    m.inputs["seqs"] = o.seqs;
    m.outputs["out-dir"] = o.out_dir;
    write_manifest(fs::path(o.out_dir) / "manifest.json", m);
    return kOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
    std::string gt;
    std::string res;
    double iou_thresh = 0.5;
    double min_visibility = 0.0;
    bool keep_ignored = false;
    std::string report;
    std::string plot;
};

void write_plot_svg(const fs::path& path, const st::GroundTruth& gt, std::span<const st::ResultRecord> res) {
    std::map<std::int64_t, std::pair<std::vector<const st::GtRecord*>, std::vector<const st::ResultRecord*>>> frames;
    double width = 1.0, height = 1.0;
    for (const auto& g : gt.records) {
        frames[g.frame].first.push_back(&g);
        width = std::max(width, g.box.right());
        height = std::max(height, g.box.bottom());
    }
    for (const auto& r : res) {
        frames[r.frame].second.push_back(&r);
        width = std::max(width, r.box.right());
        height = std::max(height, r.box.bottom());
    }
    const int columns = 5;
    const double panel_w = 240.0;
    const double scale = panel_w / width;
    const double panel_h = height * scale + 16.0;
    const auto rows = (static_cast<long>(frames.size()) + columns - 1) / columns;
    auto px = [](double v) { return fmt_fixed(v, 2); };

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw st::Error("cannot open " + path.string() + " for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(columns * (panel_w + 8.0)) << "\" height=\""
        << px(static_cast<double>(std::max<long>(rows, 1)) * (panel_h + 8.0)) << "\" font-family=\"monospace\" font-size=\"9\">\n";
    out << "<!-- green: ground truth, red: results -->\n";
    long k = 0;
    for (const auto& [frame, boxes] : frames) {
        const double ox = static_cast<double>(k % columns) * (panel_w + 8.0);
        const double oy = static_cast<double>(k / columns) * (panel_h + 8.0);
        out << "<g transform=\"translate(" << px(ox) << "," << px(oy) << ")\">\n";
        out << "<rect x=\"0\" y=\"0\" width=\"" << px(panel_w) << "\" height=\"" << px(panel_h)
            << "\" fill=\"#f8f8f8\" stroke=\"#999\"/>\n";
        out << "<text x=\"3\" y=\"11\">frame " << frame << "</text>\n";
        auto rect = [&](const st::BoundingBox& b, const char* colour, const char* dash) {
            out << "<rect x=\"" << px(b.x * scale) << "\" y=\"" << px(16.0 + b.y * scale) << "\" width=\""
                << px(b.w * scale) << "\" height=\"" << px(b.h * scale) << "\" fill=\"none\" stroke=\"" << colour
                << "\"" << dash << "/>\n";
        };
        for (const auto* g : boxes.first) rect(g->box, "#2a2", "");
        for (const auto* r : boxes.second) {
            rect(r->box, "#d22", " stroke-dasharray=\"3,2\"");
            out << "<text x=\"" << px(r->box.x * scale) << "\" y=\"" << px(16.0 + r->box.y * scale - 1.0)
                << "\" fill=\"#d22\">" << r->id << "</text>\n";
        }
        out << "</g>\n";
        ++k;
    }
    out << "</svg>\n";
}

int run_eval(const EvalOptions& o) {
    st::GtFilter filter;
    filter.drop_ignored = !o.keep_ignored;
    filter.min_visibility = o.min_visibility;
    const auto gt = st::read_ground_truth(fs::path(o.gt), filter);
    const auto res = st::read_results(fs::path(o.res));
    const auto report = st::evaluate(gt, res, o.iou_thresh);
    std::cout << st::format_report_text(report) << '\n';

    Manifest m;
    m.command = "eval";
    m.arguments = {"eval", "--gt", o.gt, "--res", o.res, "--iou-thresh", fmt(o.iou_thresh), "--min-visibility",
                   fmt(o.min_visibility)};
    if (o.keep_ignored) m.arguments.push_back("--keep-ignored");
    m.inputs["gt"] = o.gt;
    m.inputs["res"] = o.res;
    if (!o.report.empty()) {
        std::ostringstream kv;
        st::write_report_kv(kv, report);
        if (fs::path(o.report).has_parent_path()) fs::create_directories(fs::path(o.report).parent_path());
        std::ofstream out(o.report, std::ios::trunc);
        if (!out) throw st::Error("cannot open " + o.report + " for writing");
        out << kv.str();
        m.arguments.insert(m.arguments.end(), {"--report", o.report});
        m.outputs["report"] = o.report;
    }
    if (!o.plot.empty()) {
        write_plot_svg(o.plot, gt, res);
        m.arguments.insert(m.arguments.end(), {"--plot", o.plot});
        m.outputs["plot"] = o.plot;
    }
    if (!o.report.empty()) write_manifest(manifest_path_for(o.report), m);
    else if (!o.plot.empty()) write_manifest(manifest_path_for(o.plot), m);
    return kOk;
}

// ---------------------------------------------------------------------------
// synth, bench, interp

int run_synth(const std::string& preset, std::uint64_t seed, const std::string& out) {
    const auto sc = st::generate(st::make_preset(preset, seed));
    st::write_scenario(out, sc);
    Manifest m;
    m.command = "synth";
    m.arguments = {"synth", "--preset", preset, "--seed", std::to_string(seed), "--out", out};
    m.outputs["out"] = out;
    m.seed = seed;
    write_manifest(fs::path(out) / "manifest.json", m);
    std::cout << "wrote " << preset << " (" << sc.spec.num_frames << " frames, " << sc.spec.targets.size()
              << " targets) to " << out << '\n';
    return kOk;
}

int run_bench(std::size_t tracks, std::size_t dets, std::size_t dim, std::size_t iterations, std::uint64_t seed) {
    const auto r = st::bench_costs(tracks, dets, dim, iterations, seed);
    std::cout << "cost matrix " << tracks << " x " << dets << ", dim " << dim << ", median of " << iterations
              << " runs\n";
    std::cout << std::left << std::setw(8) << "method" << std::right << std::setw(14) << "median_ns" << '\n';
    std::cout << std::left << std::setw(8) << "EG" << std::right << std::setw(14) << fmt_fixed(r.eg_ns, 0) << '\n';
    std::cout << std::left << std::setw(8) << "EM" << std::right << std::setw(14) << fmt_fixed(r.em_ns, 0) << '\n';
    std::cout << std::left << std::setw(8) << "IoU" << std::right << std::setw(14) << fmt_fixed(r.iou_ns, 0) << '\n';
    std::cout << "EG/EM " << fmt_fixed(r.eg_ns / r.em_ns, 3) << '\n';
    return kOk;
}

int run_interp(const std::string& res, std::int64_t max_gap, const std::string& out) {
    const auto records = st::read_results(fs::path(res));
    const auto filled = st::linear_interpolation(records, max_gap);
    st::write_results(fs::path(out), filled);
    Manifest m;
    m.command = "interp";
    m.arguments = {"interp", "--res", res, "--max-gap", std::to_string(max_gap), "--out", out};
    m.inputs["res"] = res;
    m.outputs["out"] = out;
    write_manifest(manifest_path_for(out), m);
    return kOk;
}

int run_cli(std::vector<std::string> args);

// Re-executes a manifest. With --out-dir every output path is redirected to
// a file of the same name inside that directory.
int run_replay(const std::string& manifest, const std::string& out_dir) {
    std::ifstream in(manifest);
    if (!in) throw st::FormatError(manifest, 0, "cannot open file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw st::FormatError(manifest, 0, e.what());
    }
    if (!j.contains("arguments") || !j["arguments"].is_array()) {
        throw st::FormatError(manifest, 0, "manifest has no argument list");
    }
    auto args = j["arguments"].get<std::vector<std::string>>();
    if (!out_dir.empty() && j.contains("outputs")) {
        for (const auto& [flag, value] : j["outputs"].items()) {
            const auto it = std::find(args.begin(), args.end(), "--" + flag);
            if (it == args.end() || std::next(it) == args.end()) continue;
            *std::next(it) = (fs::path(out_dir) / fs::path(value.get<std::string>()).lexically_normal().filename()).string();
        }
    }
    if (!args.empty() && args.front() == "replay") throw st::FormatError(manifest, 0, "manifest replays itself");
    return run_cli(std::move(args));
}

int run_cli(std::vector<std::string> args) {
    CLI::App app{"Online multi-object tracking with appearance and GIoU association"};
    app.name("simpletrack");
    app.set_version_flag("--version", std::string(st::kVersion));
    app.require_subcommand(1);

    TrackOptions track;
    auto* track_cmd = app.add_subcommand("track", "Track a detection sequence");
    track_cmd->add_option("--dets", track.dets, "Detections file (#dim header, frame,x,y,w,h,score,emb...)");
    track_cmd->add_option("--grid", track.grid, "Embedding grid sidecar");
    track_cmd->add_option("--out", track.out, "Results file");
    track_cmd->add_option("--seqs", track.seqs, "Sequence directories holding dets.txt and optional grid.bin");
    track_cmd->add_option("--out-dir", track.out_dir, "Results directory for --seqs");
    track_cmd->add_option("--jobs", track.jobs, "Sequences tracked in parallel")->capture_default_str();
    add_config_flags(track_cmd, track);

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score results against ground truth");
    eval_cmd->add_option("--gt", eval.gt, "Ground truth file")->required();
    eval_cmd->add_option("--res", eval.res, "Results file")->required();
    eval_cmd->add_option("--iou-thresh", eval.iou_thresh, "IoU needed for a match")->capture_default_str();
    eval_cmd->add_option("--min-visibility", eval.min_visibility, "Drop GT rows less visible than this")
        ->capture_default_str();
    eval_cmd->add_flag("--keep-ignored", eval.keep_ignored, "Keep GT rows flagged with conf 0");
    eval_cmd->add_option("--report", eval.report, "Write key=value metrics here");
    eval_cmd->add_option("--plot", eval.plot, "Write an SVG of per-frame boxes here");

    std::string preset;
    std::uint64_t seed = 0;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario");
    synth_cmd->add_option("--preset", preset, "Scenario preset")->required()->check(CLI::IsMember(st::preset_names()));
    synth_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();

    std::size_t bench_tracks = 50, bench_dets = 50, bench_dim = 128, bench_iterations = 101;
    std::uint64_t bench_seed = 0;
    auto* bench_cmd = app.add_subcommand("bench", "Time cost-matrix construction");
    bench_cmd->add_option("--tracks", bench_tracks, "Rows")->capture_default_str()->check(CLI::PositiveNumber);
    bench_cmd->add_option("--dets", bench_dets, "Columns")->capture_default_str()->check(CLI::PositiveNumber);
    bench_cmd->add_option("--dim", bench_dim, "Embedding dimension")->capture_default_str()->check(CLI::PositiveNumber);
    bench_cmd->add_option("--iterations", bench_iterations, "Timed runs")->capture_default_str()->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench_seed, "Random seed")->capture_default_str();

    std::string interp_res, interp_out;
    std::int64_t max_gap = 20;
    auto* interp_cmd = app.add_subcommand("interp", "Fill short gaps in results by linear interpolation");
    interp_cmd->add_option("--res", interp_res, "Results file")->required();
    interp_cmd->add_option("--max-gap", max_gap, "Longest gap filled, in frames")->capture_default_str()
        ->check(CLI::Range(std::int64_t{1}, std::numeric_limits<std::int64_t>::max()));
    interp_cmd->add_option("--out", interp_out, "Output results file")->required();

    std::string replay_manifest, replay_out_dir;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay_cmd->add_option("--manifest", replay_manifest, "Manifest file")->required();
    replay_cmd->add_option("--out-dir", replay_out_dir, "Redirect outputs into this directory");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*track_cmd) return run_track(track);
        if (*eval_cmd) return run_eval(eval);
        if (*synth_cmd) return run_synth(preset, seed, synth_out);
        if (*bench_cmd) return run_bench(bench_tracks, bench_dets, bench_dim, bench_iterations, bench_seed);
        if (*interp_cmd) return run_interp(interp_res, max_gap, interp_out);
        if (*replay_cmd) return run_replay(replay_manifest, replay_out_dir);
    } catch (const UsageError& e) {
        std::cerr << "simpletrack: " << e.what() << "\n\n" << app.help() << std::flush;
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "simpletrack: " << e.what() << '\n';
        return kUsage;
    }
    return kInternal;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run_cli(std::move(args));
    } catch (const st::Error& e) {
        std::cerr << "simpletrack: error: " << e.what() << '\n';
        return kInput;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "simpletrack: error: " << e.what() << '\n';
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "simpletrack: internal error: " << e.what() << '\n';
        return kInternal;
    }
}
