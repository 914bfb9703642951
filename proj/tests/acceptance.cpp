// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.
//
//   acceptance [--cli PATH] [--workdir DIR]

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "simpletrack/simpletrack.hpp"

namespace st = simpletrack;
namespace fs = std::filesystem;
using st::BoundingBox;

namespace {

// Pinned tolerances and budgets.
constexpr double kInvariantTol = 1e-9;
constexpr double kAssignmentCostTol = 1e-9;
constexpr double kIdf1Tol = 1e-12;
constexpr double kMotaTol = 1e-12;
constexpr double kNoiseFreeTol = 1e-6;
constexpr double kSymmetryTol = 1e-9;
constexpr double kPsdTol = 1e-9;
constexpr double kEgOverEmMax = 0.9;
constexpr double kAssignmentBudgetS = 10.0;
constexpr double kCrossingBudgetS = 5.0;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v, int decimals = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(decimals);
    os << v;
    return os.str();
}

std::string sci(double v) {
    std::ostringstream os;
    os.setf(std::ios::scientific);
    os.precision(2);
    os << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("missing file " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<st::ResultRecord> track_frames(const std::vector<st::FrameInput>& frames, const st::TrackerConfig& cfg) {
    st::Tracker tracker(cfg);
    std::vector<st::ResultRecord> out;
    for (const auto& f : frames) {
        for (const auto& o : tracker.update(f)) out.push_back({f.frame, o.id, o.box, o.score});
    }
    return out;
}

// ---------------------------------------------------------------------------

Outcome ac1_assignment() {
    const auto t0 = std::chrono::steady_clock::now();
    st::Random rng(101);
    int mismatches = 0;
    for (int k = 0; k < 1000; ++k) {
        const auto rows = static_cast<std::size_t>(rng.bits() % 8);
        const auto cols = static_cast<std::size_t>(rng.bits() % 8);
        const auto m = st::testing::random_lattice_matrix(rng, rows, cols, rng.uniform(0.0, 0.5));
        const double gate = std::floor(rng.uniform(0.0, 1.2) * 64.0) / 64.0;
        const auto got = st::solve(m, gate);
        const auto want = st::testing::brute_force_assignment(m, gate);
        bool ok = got.matches.size() == want.count && std::fabs(got.total_cost() - want.cost) <= kAssignmentCostTol;
        std::set<std::int64_t> rs, cs;
        for (const auto& p : got.matches) {
            ok = ok && p.cost <= gate && rs.insert(p.row_id).second && cs.insert(p.col_id).second;
        }
        ok = ok && got.matches.size() + got.unmatched_rows.size() == rows &&
             got.matches.size() + got.unmatched_cols.size() == cols;
        mismatches += !ok;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < kAssignmentBudgetS,
            "1000 matrices, mismatches=" + std::to_string(mismatches) + ", " + fmt(secs, 3) + "s"};
}

Outcome ac2_giou() {
    st::Random rng(202);
    double worst = 0.0;
    bool ok = true;
    for (int k = 0; k < 10000; ++k) {
        const auto a = st::testing::random_box(rng);
        const auto b = st::testing::random_box(rng);
        const double g = st::giou_distance(a, b);
        ok = ok && g >= 0.0 && g < 2.0 && st::giou_distance(a, a) == 0.0;
        worst = std::max(worst, std::fabs(g - st::giou_distance(b, a)));
        const double dx = rng.uniform(-500, 500), dy = rng.uniform(-500, 500), s = rng.uniform(0.1, 10.0);
        worst = std::max(worst, std::fabs(g - st::giou_distance({a.x + dx, a.y + dy, a.w, a.h}, {b.x + dx, b.y + dy, b.w, b.h})));
        worst = std::max(worst, std::fabs(g - st::giou_distance({a.x * s, a.y * s, a.w * s, a.h * s},
                                                                {b.x * s, b.y * s, b.w * s, b.h * s})));
    }
    // Hand examples: identical boxes, and unit boxes with a one-unit gap.
    ok = ok && st::giou_distance({0, 0, 10, 10}, {0, 0, 10, 10}) == 0.0;
    ok = ok && std::fabs(st::giou_distance({0, 0, 1, 1}, {2, 2, 1, 1}) - 16.0 / 9.0) <= kInvariantTol;
    return {ok && worst <= kInvariantTol, "10000 pairs, worst invariant error " + sci(worst)};
}

Outcome ac3_crossing() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sc = st::generate(st::make_preset("crossing", 7));
    const auto gt = st::evaluation_gt(sc);
    st::TrackerConfig simple;
    st::TrackerConfig byte;
    byte.strategy = st::Strategy::Byte;
    const auto rs = st::evaluate(gt, track_frames(sc.frames, simple));
    const auto rb = st::evaluate(gt, track_frames(sc.frames, byte));
    const double secs = seconds_since(t0);
    const bool ok = rs.idsw == 0 && rs.idf1 >= rb.idf1 && secs < kCrossingBudgetS;
    return {ok, "simpletrack IDsw=" + std::to_string(rs.idsw) + " IDF1=" + fmt(rs.idf1, 3) + ", byte IDsw=" +
                    std::to_string(rb.idsw) + " IDF1=" + fmt(rb.idf1, 3) + ", " + fmt(secs, 2) + "s"};
}

Outcome ac4_retrieval() {
    const auto sc = st::generate(st::make_preset("occlusion-reappear", 7));
    const auto gt = st::evaluation_gt(sc);
    st::Tracker tracker{st::TrackerConfig{}};
    std::vector<st::ResultRecord> res;
    long retrieved = 0;
    for (const auto& f : sc.frames) {
        for (const auto& o : tracker.update(f)) res.push_back({f.frame, o.id, o.box, o.score});
        retrieved += static_cast<long>(tracker.last_stats().retrieved);
    }
    const auto r = st::evaluate(gt, res);
    return {r.idsw == 0 && retrieved > 0,
            "IDsw=" + std::to_string(r.idsw) + " retrieved=" + std::to_string(retrieved) + " MOTA=" + fmt(r.mota, 3)};
}

Outcome ac5_cost_speed() {
    const auto r = st::bench_costs(50, 50, 128, 101);
    const double ratio = r.eg_ns / r.em_ns;
    return {ratio <= kEgOverEmMax, "50x50x128 median EG=" + fmt(r.eg_ns, 0) + "ns EM=" + fmt(r.em_ns, 0) +
                                       "ns ratio=" + fmt(ratio, 3)};
}

Outcome ac6_metrics() {
    st::Random rng(606);
    int checked = 0, bad = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto s = st::testing::random_small_sequence(rng, 3, 10);
        if (s.gt.records.empty()) continue;
        const auto r = st::evaluate(s.gt, s.res);
        const double mota = 1.0 - static_cast<double>(r.fp + r.fn + r.idsw) / static_cast<double>(r.num_gt);
        bad += std::fabs(r.idf1 - st::testing::brute_force_idf1(s.gt, s.res)) > kIdf1Tol ||
               std::fabs(r.mota - mota) > kMotaTol;
        ++checked;
    }
    st::GroundTruth gt;
    std::vector<st::ResultRecord> res;
    for (int f = 1; f <= 20; ++f) {
        for (int id = 1; id <= 3; ++id) {
            const BoundingBox b{30.0 * id + f, 10.0, 20.0, 40.0};
            gt.records.push_back({f, id, b, 1, 1, 1.0});
            res.push_back({f, 100 + id, b, 1.0});
        }
    }
    const auto perfect = st::evaluate(gt, res);
    const bool ok = bad == 0 && checked > 0 && perfect.mota == 1.0 && perfect.idf1 == 1.0;
    return {ok, std::to_string(checked) + " random instances, mismatches=" + std::to_string(bad) +
                    ", perfect MOTA=" + fmt(perfect.mota, 3) + " IDF1=" + fmt(perfect.idf1, 3)};
}

Outcome ac7_kalman() {
    const st::KalmanFilter kf;
    st::Random rng(707);
    auto s = kf.initiate({100, 100, 40, 80});
    double asym = 0.0, eig = 0.0;
    for (int k = 0; k < 1000; ++k) {
        s = kf.predict(s);
        const auto [cx, cy] = st::predicted_center(s);
        const double h = std::max(5.0, s.mean(3) + rng.normal() * 2.0);
        const double w = std::max(2.0, s.mean(2) * s.mean(3) + rng.normal());
        if (rng.uniform() < 0.8) s = kf.update(s, BoundingBox::from_center(cx + rng.normal() * 3.0, cy + rng.normal() * 3.0, w, h));
        asym = std::max(asym, st::testing::max_asymmetry(s.covariance));
        eig = std::min(eig, st::testing::min_eigenvalue(s.covariance));
    }

    const st::KalmanFilter exact(st::KalmanNoise{1.0 / 20, 1.0 / 160, 0.0, 0.0});
    auto truth = [](int k) { return BoundingBox::from_center(40.0 + 3.5 * k, 80.0 - 1.25 * k, 30.0, 60.0 + 0.5 * k); };
    auto e = exact.initiate(truth(0));
    e = exact.update(exact.predict(e), truth(1));
    e = exact.update(exact.predict(e), truth(2));
    double pred_err = 0.0;
    for (int k = 3; k < 20; ++k) {
        e = exact.predict(e);
        const auto [cx, cy] = st::predicted_center(e);
        pred_err = std::max({pred_err, std::fabs(cx - truth(k).center_x()), std::fabs(cy - truth(k).center_y())});
        e = exact.update(e, truth(k));
    }

    int trip_fail = 0;
    for (int k = 0; k < 1000; ++k) {
        const auto b = st::testing::random_box(rng, 1000.0, 0.5, 300.0);
        trip_fail += !(st::predicted_box(kf.initiate(b)) == b);
    }
    const bool ok = asym < kSymmetryTol && eig > -kPsdTol && pred_err < kNoiseFreeTol && trip_fail == 0;
    return {ok, "asym=" + sci(asym) + " min_eig=" + sci(eig) + " cv_err=" + sci(pred_err) + " round_trip_failures=" + std::to_string(trip_fail)};
}

Outcome ac8_interpolation() {
    const auto sc = st::generate(st::make_preset("occlusion-reappear", 7));
    const auto gt = st::evaluation_gt(sc);
    auto frames = sc.frames;
    for (auto& f : frames) f.grid.reset();
    st::TrackerConfig cfg;
    cfg.retrieval_enabled = false;
    const auto res = track_frames(frames, cfg);
    const auto filled = st::linear_interpolation(res, 20);
    const auto before = st::evaluate(gt, res);
    const auto after = st::evaluate(gt, filled);
    const bool idempotent = st::linear_interpolation(filled, 20) == filled;
    return {after.mota > before.mota && idempotent,
            "MOTA " + fmt(before.mota, 3) + " -> " + fmt(after.mota, 3) + (idempotent ? ", idempotent" : ", not idempotent")};
}

// synth -> files -> track -> results -> eval -> report, all through files.
void file_pipeline(const fs::path& dir) {
    fs::remove_all(dir);
    st::write_scenario(dir, st::generate(st::make_preset("crossing", 7)));
    auto seq = st::read_detections(dir / "dets.txt");
    st::GridReader grids(dir / "grid.bin");
    st::Tracker tracker{st::TrackerConfig{}};
    std::vector<st::ResultRecord> res;
    for (auto& f : seq.frames) {
        f.grid = grids.seek(f.frame);
        for (const auto& o : tracker.update(f)) res.push_back({f.frame, o.id, o.box, o.score});
    }
    st::write_results(dir / "res.txt", res);
    const auto report = st::evaluate(st::read_ground_truth(dir / "gt.txt", {}), st::read_results(dir / "res.txt"));
    std::ofstream out(dir / "report.txt", std::ios::trunc);
    st::write_report_kv(out, report);
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome ac9_reproducibility(const fs::path& work, const std::string& cli) {
    file_pipeline(work / "run_a");
    file_pipeline(work / "run_b");
    bool ok = true;
    for (const char* f : {"gt.txt", "dets.txt", "grid.bin", "res.txt", "report.txt"}) {
        ok = ok && slurp(work / "run_a" / f) == slurp(work / "run_b" / f);
    }
    std::string detail = ok ? "in-process reruns byte-identical" : "in-process reruns differ";
    if (cli.empty()) return {ok, detail + ", cli not checked"};

    const fs::path c = work / "cli";
    fs::remove_all(c);
    const std::string q = "\"" + cli + "\"";
    const std::string quiet = " >/dev/null 2>&1";
    auto p = [](const fs::path& x) { return "\"" + x.string() + "\""; };
    int rc = 0;
    rc |= shell(q + " synth --preset crossing --seed 7 --out " + p(c / "seq") + quiet);
    rc |= shell(q + " track --dets " + p(c / "seq/dets.txt") + " --grid " + p(c / "seq/grid.bin") + " --out " +
                p(c / "res.txt") + quiet);
    rc |= shell(q + " eval --gt " + p(c / "seq/gt.txt") + " --res " + p(c / "res.txt") + " --report " +
                p(c / "report.txt") + quiet);
    rc |= shell(q + " replay --manifest " + p(c / "seq/manifest.json") + " --out-dir " + p(c / "replay_seq") + quiet);
    rc |= shell(q + " replay --manifest " + p(c / "res.txt.manifest.json") + " --out-dir " + p(c / "replay") + quiet);
    rc |= shell(q + " replay --manifest " + p(c / "report.txt.manifest.json") + " --out-dir " + p(c / "replay") + quiet);
    if (rc != 0) return {false, detail + ", cli command failed"};
    bool cli_ok = slurp(c / "res.txt") == slurp(c / "replay/res.txt") &&
                  slurp(c / "report.txt") == slurp(c / "replay/report.txt") &&
                  slurp(c / "seq/dets.txt") == slurp(c / "replay_seq/seq/dets.txt") &&
                  slurp(c / "res.txt") == slurp(work / "run_a/res.txt") &&
                  slurp(c / "report.txt") == slurp(work / "run_a/report.txt");
    detail += cli_ok ? ", cli replay byte-identical" : ", cli replay differs";
    return {ok && cli_ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    fs::path work = fs::temp_directory_path() / "simpletrack_acceptance";
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc) {
            cli = argv[++i];
        } else if (a == "--workdir" && i + 1 < argc) {
            work = argv[++i];
        } else {
            std::cerr << "usage: acceptance [--cli PATH] [--workdir DIR]\n";
            return 2;
        }
    }
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC-1", ac1_assignment},
        {"AC-2", ac2_giou},
        {"AC-3", ac3_crossing},
        {"AC-4", ac4_retrieval},
        {"AC-5", ac5_cost_speed},
        {"AC-6", ac6_metrics},
        {"AC-7", ac7_kalman},
        {"AC-8", ac8_interpolation},
        {"AC-9", [&] { return ac9_reproducibility(work, cli); }},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << name << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
