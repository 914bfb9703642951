// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#pragma once

// Deterministic synthetic scenarios: ground truth, noisy detections with
// embeddings, and per-frame embedding grids.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "simpletrack/geometry.hpp"
#include "simpletrack/mot_io.hpp"
#include "simpletrack/tracker.hpp"

namespace simpletrack {

/// Portable random source: mt19937_64 bits with explicit conversions, so a
/// seed produces the same stream on every standard library.
class Random {
public:
    explicit Random(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal (Box-Muller).
    double normal() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        return r * std::cos(theta);
    }

    /// Normal with standard deviation `std`, truncated to +-3 std.
    double truncated_normal(double std) {
        if (std <= 0.0) return 0.0;
        double z = normal();
        while (std::fabs(z) > 3.0) z = normal();
        return z * std;
    }

    std::uint64_t bits() { return engine_(); }

    /// Unit vector with isotropic direction.
    std::vector<double> unit_vector(std::size_t dim) {
        std::vector<double> v(dim);
        double sq = 0.0;
        do {
            sq = 0.0;
            for (auto& x : v) {
                x = normal();
                sq += x * x;
            }
        } while (sq == 0.0);
        const double n = std::sqrt(sq);
        for (auto& x : v) x /= n;
        return v;
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

struct Waypoint {
    std::int64_t frame;
    double cx;
    double cy;
};

struct TargetSpec {
    std::int64_t spawn = 1;
    std::int64_t despawn = 1;
    std::vector<Waypoint> path;  // piecewise-linear center trajectory, ascending frames
    double width = 40.0;
    double height = 80.0;
    int layer = 0;  // higher layers are drawn in front
};

enum class OcclusionMode {
    Missed,    // detector fails; object still visible in grid and ground truth
    LowScore,  // detection emitted with a score from the low range
    Hidden,    // fully occluded: no detection, absent from the grid, gt row flagged ignore
};

struct OcclusionWindow {
    std::size_t target = 0;
    std::int64_t first = 1;
    std::int64_t last = 1;
    OcclusionMode mode = OcclusionMode::Missed;
};

struct ScoreModel {
    double tracked_lo = 0.7;
    double tracked_hi = 0.95;
    double occluded_lo = 0.22;
    double occluded_hi = 0.29;
};

struct ScenarioSpec {
    std::string name = "custom";
    std::int64_t num_frames = 1;
    double image_width = 320.0;
    double image_height = 240.0;
    std::vector<TargetSpec> targets;
    std::vector<OcclusionWindow> occlusions;
    double det_noise_std = 0.0;  // pixels, on box centers
    std::size_t emb_dim = 64;
    double emb_noise_std = 0.0;  // per component, before renormalization
    std::size_t grid_stride = 8;
    bool with_grid = true;
    ScoreModel score_model;
    std::uint64_t seed = 0;

    void validate() const {
        auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };
        if (num_frames < 1) fail("num_frames must be >= 1");
        if (!(image_width > 0.0) || !(image_height > 0.0)) fail("image size must be positive");
        if (!(det_noise_std >= 0.0) || !(emb_noise_std >= 0.0)) fail("noise stds must be >= 0");
        if (emb_dim == 0) fail("emb_dim must be >= 1");
        if (grid_stride == 0) fail("grid_stride must be >= 1");
        const auto& s = score_model;
        if (!(0.0 <= s.tracked_lo && s.tracked_lo <= s.tracked_hi && s.tracked_hi <= 1.0) ||
            !(0.0 <= s.occluded_lo && s.occluded_lo <= s.occluded_hi && s.occluded_hi <= 1.0)) {
            fail("score ranges must be ordered within [0, 1]");
        }
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const auto& t = targets[i];
            const auto tag = "target " + std::to_string(i) + ": ";
            if (t.spawn < 1 || t.despawn > num_frames || t.spawn > t.despawn) fail(tag + "spawn/despawn outside sequence");
            if (t.path.empty()) fail(tag + "empty path");
            for (std::size_t k = 1; k < t.path.size(); ++k) {
                if (t.path[k].frame <= t.path[k - 1].frame) fail(tag + "path frames must increase");
            }
            if (!(t.width > 0.0) || !(t.height > 0.0)) fail(tag + "box size must be positive");
        }
        for (std::size_t i = 0; i < occlusions.size(); ++i) {
            const auto& o = occlusions[i];
            const auto tag = "occlusion " + std::to_string(i) + ": ";
            if (o.target >= targets.size()) fail(tag + "unknown target");
            const auto& t = targets[o.target];
            if (o.first > o.last || o.first < t.spawn || o.last > t.despawn) fail(tag + "frames outside target lifetime");
            for (std::size_t j = 0; j < i; ++j) {
                const auto& p = occlusions[j];
                if (p.target == o.target && !(o.last < p.first || p.last < o.first)) fail(tag + "overlaps another window");
            }
        }
    }
};

/// Center of a target at `frame` along its piecewise-linear path.
inline std::pair<double, double> path_center(const TargetSpec& t, std::int64_t frame) {
    const auto& p = t.path;
    if (frame <= p.front().frame) return {p.front().cx, p.front().cy};
    if (frame >= p.back().frame) return {p.back().cx, p.back().cy};
    for (std::size_t k = 1; k < p.size(); ++k) {
        if (frame <= p[k].frame) {
            const double u = static_cast<double>(frame - p[k - 1].frame) / static_cast<double>(p[k].frame - p[k - 1].frame);
            return {p[k - 1].cx + (p[k].cx - p[k - 1].cx) * u, p[k - 1].cy + (p[k].cy - p[k - 1].cy) * u};
        }
    }
    return {p.back().cx, p.back().cy};
}

inline BoundingBox target_box(const TargetSpec& t, std::int64_t frame) {
    const auto [cx, cy] = path_center(t, frame);
    return BoundingBox::from_center(cx, cy, t.width, t.height);
}

inline std::optional<OcclusionMode> occlusion_at(const ScenarioSpec& spec, std::size_t target, std::int64_t frame) {
    for (const auto& o : spec.occlusions) {
        if (o.target == target && o.first <= frame && frame <= o.last) return o.mode;
    }
    return std::nullopt;
}

struct Scenario {
    ScenarioSpec spec;
    GroundTruth gt;                  // includes Hidden rows with conf = 0
    std::vector<FrameInput> frames;  // frames 1..num_frames
    std::vector<Embedding> signatures;
};

namespace synth_detail {

inline Embedding noisy_signature(const Embedding& signature, double noise_std, Random& rng) {
    std::vector<double> v(signature.values().begin(), signature.values().end());
    for (auto& x : v) x += noise_std * rng.normal();
    Embedding e(std::move(v));
    e.normalize();
    return e;
}

}  // namespace synth_detail

/// Builds the scenario. Each target gets a random unit signature; detection
/// embeddings and grid cells covered by a target hold its signature plus
/// Gaussian noise, renormalized; other cells hold random unit vectors. Box
/// centers get Gaussian pixel noise and sizes log-normal jitter (both
/// truncated at 3 sigma). Output depends only on the spec.
inline Scenario generate(const ScenarioSpec& spec) {
    spec.validate();
    Random rng(spec.seed);
    Scenario sc;
    sc.spec = spec;
    for (std::size_t i = 0; i < spec.targets.size(); ++i) sc.signatures.emplace_back(rng.unit_vector(spec.emb_dim));

    const std::size_t grid_h = static_cast<std::size_t>(std::ceil(spec.image_height / static_cast<double>(spec.grid_stride)));
    const std::size_t grid_w = static_cast<std::size_t>(std::ceil(spec.image_width / static_cast<double>(spec.grid_stride)));

    for (std::int64_t f = 1; f <= spec.num_frames; ++f) {
        FrameInput fi;
        fi.frame = f;
        std::vector<std::size_t> present;
        for (std::size_t i = 0; i < spec.targets.size(); ++i) {
            if (spec.targets[i].spawn <= f && f <= spec.targets[i].despawn) present.push_back(i);
        }
        auto hidden = [&](std::size_t i) { return occlusion_at(spec, i, f) == OcclusionMode::Hidden; };
        auto in_front = [&](std::size_t a, std::size_t b) {  // a drawn over b
            const int la = spec.targets[a].layer, lb = spec.targets[b].layer;
            return la > lb || (la == lb && a > b);
        };

        for (auto i : present) {
            const auto& t = spec.targets[i];
            GtRecord r;
            r.frame = f;
            r.id = static_cast<std::int64_t>(i) + 1;
            r.box = target_box(t, f);
            r.cls = 1;
            if (hidden(i)) {
                r.conf = 0;
                r.visibility = 0.0;
            } else {
                double covered = 0.0;
                for (auto j : present) {
                    if (j == i || hidden(j) || !in_front(j, i)) continue;
                    const auto o = target_box(spec.targets[j], f);
                    const double iw = std::min(r.box.right(), o.right()) - std::max(r.box.left(), o.left());
                    const double ih = std::min(r.box.bottom(), o.bottom()) - std::max(r.box.top(), o.top());
                    if (iw > 0 && ih > 0) covered = std::max(covered, iw * ih / r.box.area());
                }
                r.visibility = 1.0 - covered;
            }
            sc.gt.records.push_back(r);
        }

        for (auto i : present) {
            const auto mode = occlusion_at(spec, i, f);
            if (mode == OcclusionMode::Missed || mode == OcclusionMode::Hidden) continue;
            const auto& t = spec.targets[i];
            const auto [cx, cy] = path_center(t, f);
            Detection d;
            const double dcx = rng.truncated_normal(spec.det_noise_std);
            const double dcy = rng.truncated_normal(spec.det_noise_std);
            const double w = t.width * std::exp(rng.truncated_normal(0.5 * spec.det_noise_std / t.width));
            const double h = t.height * std::exp(rng.truncated_normal(0.5 * spec.det_noise_std / t.height));
            d.box = BoundingBox::from_center(cx + dcx, cy + dcy, w, h);
            if (spec.det_noise_std == 0.0) d.box = target_box(t, f);
            const auto& sm = spec.score_model;
            d.score = mode == OcclusionMode::LowScore ? rng.uniform(sm.occluded_lo, sm.occluded_hi)
                                                      : rng.uniform(sm.tracked_lo, sm.tracked_hi);
            d.embedding = synth_detail::noisy_signature(sc.signatures[i], spec.emb_noise_std, rng);
            fi.detections.push_back(std::move(d));
        }
        // Detector output order carries no identity information.
        for (std::size_t k = fi.detections.size(); k > 1; --k) {
            std::swap(fi.detections[k - 1], fi.detections[static_cast<std::size_t>(rng.bits() % k)]);
        }

        if (spec.with_grid) {
            EmbeddingGrid grid(grid_h, grid_w, spec.emb_dim, spec.grid_stride);
            const double stride = static_cast<double>(spec.grid_stride);
            for (std::size_t r = 0; r < grid_h; ++r) {
                for (std::size_t c = 0; c < grid_w; ++c) {
                    const double px = (static_cast<double>(c) + 0.5) * stride;
                    const double py = (static_cast<double>(r) + 0.5) * stride;
                    std::optional<std::size_t> owner;
                    for (auto i : present) {
                        if (hidden(i)) continue;
                        const auto b = target_box(spec.targets[i], f);
                        if (px < b.left() || px >= b.right() || py < b.top() || py >= b.bottom()) continue;
                        if (!owner || in_front(i, *owner)) owner = i;
                    }
                    std::vector<double> v;
                    if (owner) {
                        const auto e = synth_detail::noisy_signature(sc.signatures[*owner], spec.emb_noise_std, rng);
                        v.assign(e.values().begin(), e.values().end());
                    } else {
                        v = rng.unit_vector(spec.emb_dim);
                    }
                    auto cell = grid.cell(r, c);
                    for (std::size_t k = 0; k < spec.emb_dim; ++k) cell[k] = static_cast<float>(v[k]);
                }
            }
            fi.grid = std::move(grid);
        }
        sc.frames.push_back(std::move(fi));
    }
    return sc;
}

/// Ground truth as an evaluator sees it (ignored rows dropped).
inline GroundTruth evaluation_gt(const Scenario& sc, const GtFilter& filter = {}) {
    GroundTruth gt;
    for (const auto& r : sc.gt.records) {
        if (passes(filter, r)) gt.records.push_back(r);
    }
    return gt;
}

/// Writes gt.txt, dets.txt and (when grids exist) grid.bin under `dir`.
inline void write_scenario(const std::filesystem::path& dir, const Scenario& sc) {
    std::filesystem::create_directories(dir);
    write_ground_truth(dir / "gt.txt", sc.gt);
    write_detections(dir / "dets.txt", sc.frames, sc.spec.emb_dim, sc.spec.num_frames);
    if (sc.spec.with_grid) {
        auto out = io_detail::open_output(dir / "grid.bin", std::ios::out | std::ios::binary);
        for (const auto& f : sc.frames) {
            if (f.grid) write_grid(out, f.frame, *f.grid);
        }
        if (!out) throw Error("failed writing " + (dir / "grid.bin").string());
    }
}

// ---------------------------------------------------------------------------
// Presets

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"crossing", "occlusion-reappear", "crowd-parallel"};
    return names;
}

/// Two people walk towards each other on crossing paths. Where they meet, the
/// farther one (B) turns around, walks behind the nearer one (A) and stops; it
/// is hidden for 5 frames and reappears behind A's trailing edge, far from
/// where constant-velocity motion puts it. IoU-only association loses B's
/// identity; appearance re-associates it.
inline ScenarioSpec crossing_preset(std::uint64_t seed) {
    ScenarioSpec s;
    s.name = "crossing";
    s.num_frames = 40;
    s.seed = seed;
    s.det_noise_std = 1.0;
    s.emb_dim = 64;
    s.emb_noise_std = 0.03;
    TargetSpec a;
    a.spawn = 1;
    a.despawn = 40;
    a.width = 50;
    a.height = 100;
    a.layer = 1;
    a.path = {{1, 40.0, 120.0}, {40, 274.0, 120.0}};
    TargetSpec b;
    b.spawn = 1;
    b.despawn = 40;
    b.width = 40;
    b.height = 80;
    b.layer = 0;
    b.path = {{1, 256.0, 126.0}, {19, 148.0, 126.0}, {21, 160.0, 126.0}, {40, 160.0, 126.0}};
    s.targets = {a, b};
    s.occlusions = {{1, 19, 23, OcclusionMode::Hidden}};
    return s;
}

/// Three targets on straight paths. Target 2 is missed by the detector for 4
/// frames while staying visible in the embedding grid; target 3 yields only
/// low-score detections for 3 frames.
inline ScenarioSpec occlusion_reappear_preset(std::uint64_t seed) {
    ScenarioSpec s;
    s.name = "occlusion-reappear";
    s.num_frames = 40;
    s.seed = seed;
    s.det_noise_std = 1.0;
    s.emb_dim = 64;
    s.emb_noise_std = 0.03;
    TargetSpec t1{1, 40, {{1, 40.0, 60.0}, {40, 274.0, 60.0}}, 40, 80, 0};
    TargetSpec t2{1, 40, {{1, 280.0, 170.0}, {40, 85.0, 170.0}}, 40, 80, 0};
    TargetSpec t3{5, 40, {{5, 160.0, 40.0}, {40, 160.0, 180.0}}, 36, 72, 1};
    s.targets = {t1, t2, t3};
    s.occlusions = {{1, 16, 19, OcclusionMode::Missed}, {2, 25, 27, OcclusionMode::LowScore}};
    return s;
}

/// Eight targets walking side by side in the same direction.
inline ScenarioSpec crowd_parallel_preset(std::uint64_t seed) {
    ScenarioSpec s;
    s.name = "crowd-parallel";
    s.num_frames = 40;
    s.seed = seed;
    s.det_noise_std = 1.0;
    s.emb_dim = 64;
    s.emb_noise_std = 0.03;
    for (int k = 0; k < 8; ++k) {
        const double x = 20.0 + 36.0 * k;
        TargetSpec t{1, 40, {{1, x, 40.0}, {40, x, 200.0}}, 30, 60, k % 2};
        s.targets.push_back(t);
    }
    return s;
}

inline ScenarioSpec make_preset(std::string_view name, std::uint64_t seed) {
    if (name == "crossing") return crossing_preset(seed);
    if (name == "occlusion-reappear") return occlusion_reappear_preset(seed);
    if (name == "crowd-parallel") return crowd_parallel_preset(seed);
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace simpletrack
