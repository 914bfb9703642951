// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#pragma once

// Online tracker state machine. One class runs three association strategies:
//
//   SimpleTrack  EG cost in both stages, then tracking retrieval on the
//                embedding grid for tracks still unmatched.
//   BYTE         the same two-stage pipeline on IoU cost, no retrieval.
//   JDE          embedding+motion (EM) cost on confident detections, then an
//                IoU pass for tracks that were tracked in the previous frame.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "simpletrack/assignment.hpp"
#include "simpletrack/error.hpp"
#include "simpletrack/geometry.hpp"
#include "simpletrack/kalman.hpp"

namespace simpletrack {

struct Detection {
    BoundingBox box;
    double score = 1.0;
    Embedding embedding;
};

/// Dense per-frame embedding map at feature-map stride. Cell (row, col) covers
/// pixels [col*stride, (col+1)*stride) x [row*stride, (row+1)*stride).
class EmbeddingGrid {
public:
    EmbeddingGrid() = default;

    EmbeddingGrid(std::size_t height, std::size_t width, std::size_t dim, std::size_t stride,
                  std::vector<float> values)
        : height_(height), width_(width), dim_(dim), stride_(stride), values_(std::move(values)) {
        if (stride_ < 1) throw std::invalid_argument("embedding grid stride must be >= 1");
        if (values_.size() != height_ * width_ * dim_) {
            throw DimensionMismatchError("embedding grid holds " + std::to_string(values_.size()) +
                                         " values, expected " + std::to_string(height_ * width_ * dim_));
        }
    }

    EmbeddingGrid(std::size_t height, std::size_t width, std::size_t dim, std::size_t stride)
        : EmbeddingGrid(height, width, dim, stride, std::vector<float>(height * width * dim, 0.0f)) {}

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t stride() const noexcept { return stride_; }
    std::span<const float> values() const noexcept { return values_; }

    std::span<const float> cell(std::size_t row, std::size_t col) const {
        return std::span<const float>(values_).subspan((row * width_ + col) * dim_, dim_);
    }
    std::span<float> cell(std::size_t row, std::size_t col) {
        return std::span<float>(values_).subspan((row * width_ + col) * dim_, dim_);
    }

    friend bool operator==(const EmbeddingGrid&, const EmbeddingGrid&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t dim_ = 0;
    std::size_t stride_ = 4;
    std::vector<float> values_;
};

struct FrameInput {
    std::int64_t frame = 0;
    std::vector<Detection> detections;
    std::optional<EmbeddingGrid> grid;
};

enum class TrackState { Tracked, Lost, Removed };

inline std::string_view to_string(TrackState s) {
    switch (s) {
        case TrackState::Tracked: return "tracked";
        case TrackState::Lost: return "lost";
        case TrackState::Removed: return "removed";
    }
    return "?";
}

struct Track {
    std::int64_t id = 0;
    KalmanState kf;
    Embedding embedding;  // EMA-smoothed, unit norm
    TrackState state = TrackState::Tracked;
    double score = 0.0;
    std::int64_t last_frame = 0;
    std::int64_t lost_age = 0;
};

enum class Strategy { SimpleTrack, Byte, Jde };

inline std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::SimpleTrack: return "simpletrack";
        case Strategy::Byte: return "byte";
        case Strategy::Jde: return "jde";
    }
    return "?";
}

inline Strategy parse_strategy(std::string_view name) {
    if (name == "simpletrack") return Strategy::SimpleTrack;
    if (name == "byte") return Strategy::Byte;
    if (name == "jde") return Strategy::Jde;
    throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

struct TrackerConfig {
    double tau_high = 0.3;          // confident detections: score > tau_high
    double tau_low = 0.2;           // second-stage detections: tau_low < score <= tau_high
    double eps_init = 0.6;          // minimum score to start a track
    double eps_retrieval = 0.1;     // cosine distance below which retrieval succeeds
    double lambda1 = 1.0;           // EG appearance weight
    double lambda2 = 0.5;           // EG location weight
    double match_thresh_high = 0.8;
    double match_thresh_low = 0.4;
    std::int64_t max_time_lost = 30;
    double ema_alpha = 0.9;
    Strategy strategy = Strategy::SimpleTrack;
    bool retrieval_enabled = true;
    // JDE baseline
    double em_weight = kDefaultEmWeight;
    double em_gate = kChi2Gate4Dof;
    double jde_iou_thresh = 0.5;

    void validate() const {
        auto fail = [](const std::string& what) { throw std::invalid_argument("tracker config: " + what); };
        if (!(0.0 <= tau_low && tau_low <= tau_high && tau_high <= 1.0)) fail("require 0 <= tau_low <= tau_high <= 1");
        if (!(eps_init >= 0.0) || !(eps_retrieval >= 0.0)) fail("score thresholds must be non-negative");
        if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) fail("EG weights must be non-negative");
        if (!(match_thresh_high >= 0.0) || !(match_thresh_low >= 0.0) || !(jde_iou_thresh >= 0.0)) {
            fail("assignment thresholds must be non-negative");
        }
        if (max_time_lost < 0) fail("max_time_lost must be non-negative");
        if (!(ema_alpha >= 0.0 && ema_alpha <= 1.0)) fail("ema_alpha must lie in [0, 1]");
        if (!(em_weight >= 0.0 && em_weight <= 1.0)) fail("em_weight must lie in [0, 1]");
        if (!(em_gate > 0.0)) fail("em_gate must be positive");
    }
};

struct TrackOutput {
    std::int64_t id;
    BoundingBox box;
    double score;

    friend bool operator==(const TrackOutput&, const TrackOutput&) = default;
};

/// Counters describing the most recent step.
struct StepStats {
    std::size_t high_detections = 0;
    std::size_t low_detections = 0;
    std::size_t first_stage_matches = 0;
    std::size_t second_stage_matches = 0;
    std::size_t retrieved = 0;
    std::size_t new_tracks = 0;
    std::size_t removed = 0;
};

/// Minimum cosine distance between `memory` and the grid cells in the 3x3
/// neighbourhood of the cell holding (cx, cy). The center cell is clamped into
/// the grid and the neighbourhood clipped to it. Cells with zero norm are
/// skipped; nullopt when no cell could be compared.
inline std::optional<double> retrieval_distance(const Embedding& memory, const EmbeddingGrid& grid, double cx,
                                                double cy) {
    if (grid.height() == 0 || grid.width() == 0 || memory.empty()) return std::nullopt;
    if (memory.dim() != grid.dim()) {
        throw DimensionMismatchError("grid dim " + std::to_string(grid.dim()) + " does not match embedding dim " +
                                     std::to_string(memory.dim()));
    }
    const double stride = static_cast<double>(grid.stride());
    auto clamp_index = [](double v, std::size_t n) -> std::int64_t {
        if (!std::isfinite(v)) return v > 0 ? static_cast<std::int64_t>(n) - 1 : 0;
        const double f = std::floor(v);
        if (f < 0.0) return 0;
        if (f >= static_cast<double>(n)) return static_cast<std::int64_t>(n) - 1;
        return static_cast<std::int64_t>(f);
    };
    const std::int64_t row = clamp_index(cy / stride, grid.height());
    const std::int64_t col = clamp_index(cx / stride, grid.width());
    const double mem_norm = memory.norm();
    if (!(mem_norm > 0.0)) return std::nullopt;

    std::optional<double> best;
    for (std::int64_t r = std::max<std::int64_t>(0, row - 1);
         r <= std::min<std::int64_t>(static_cast<std::int64_t>(grid.height()) - 1, row + 1); ++r) {
        for (std::int64_t c = std::max<std::int64_t>(0, col - 1);
             c <= std::min<std::int64_t>(static_cast<std::int64_t>(grid.width()) - 1, col + 1); ++c) {
            const auto cell = grid.cell(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            const double n = std::sqrt(detail::squared_norm(cell));
            if (!(n > 0.0) || !std::isfinite(n)) continue;
            const double d = detail::cosine_from_parts(detail::dot(memory.values(), cell), mem_norm, n);
            if (!best || d < *best) best = d;
        }
    }
    return best;
}

/// Tracking retrieval. Each candidate whose memorized embedding is within
/// `threshold` (strictly) of some grid vector around its predicted center is
/// returned to Tracked at its predicted box; no measurement update happens.
/// Returns the ids of the recovered tracks in candidate order.
inline std::vector<std::int64_t> retrieve_lost(std::span<Track* const> candidates, const EmbeddingGrid& grid,
                                               double threshold, std::int64_t frame) {
    std::vector<std::int64_t> recovered;
    for (Track* t : candidates) {
        if (t == nullptr || t->state == TrackState::Removed) continue;
        const auto [cx, cy] = predicted_center(t->kf);
        const auto d = retrieval_distance(t->embedding, grid, cx, cy);
        if (d && *d < threshold) {
            t->state = TrackState::Tracked;
            t->lost_age = 0;
            t->last_frame = frame;
            recovered.push_back(t->id);
        }
    }
    return recovered;
}

class Tracker {
public:
    explicit Tracker(TrackerConfig config = {}, KalmanNoise noise = {}) : config_(config), kf_(noise) {
        config_.validate();
    }

    const TrackerConfig& config() const noexcept { return config_; }
    const std::vector<Track>& tracks() const noexcept { return tracks_; }
    const std::vector<std::int64_t>& removed_ids() const noexcept { return removed_ids_; }
    const StepStats& last_stats() const noexcept { return stats_; }

    /// Runs the strategy selected in the configuration.
    std::vector<TrackOutput> update(const FrameInput& input) {
        switch (config_.strategy) {
            case Strategy::SimpleTrack: return step(input);
            case Strategy::Byte: return step_byte(input);
            case Strategy::Jde: return step_jde(input);
        }
        return {};
    }

    std::vector<TrackOutput> step(const FrameInput& input) { return run(input, Strategy::SimpleTrack); }
    std::vector<TrackOutput> step_byte(const FrameInput& input) { return run(input, Strategy::Byte); }
    std::vector<TrackOutput> step_jde(const FrameInput& input) { return run(input, Strategy::Jde); }

private:
    enum class Cost { Eg, Iou, Em };

    struct StageResult {
        std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track index, detection index)
        std::vector<std::size_t> unmatched_tracks;
        std::vector<std::size_t> unmatched_dets;
    };

    void validate(const FrameInput& input, Strategy strategy) {
        if (last_frame_ && input.frame <= *last_frame_) {
            throw SequencingError("frame " + std::to_string(input.frame) + " does not follow frame " +
                                  std::to_string(*last_frame_));
        }
        for (const auto& d : input.detections) {
            require_valid(d.box);
            if (!(d.score >= 0.0 && d.score <= 1.0)) {
                throw std::invalid_argument("detection score " + std::to_string(d.score) + " outside [0, 1]");
            }
            if (!dim_) dim_ = d.embedding.dim();
            if (d.embedding.dim() != *dim_) {
                throw DimensionMismatchError("frame " + std::to_string(input.frame) + ": embedding dim " +
                                             std::to_string(d.embedding.dim()) + ", sequence uses " +
                                             std::to_string(*dim_));
            }
        }
        if (strategy != Strategy::Byte && dim_ && *dim_ == 0 && !input.detections.empty()) {
            throw DimensionMismatchError("strategy '" + std::string(to_string(strategy)) +
                                         "' needs detection embeddings");
        }
        if (strategy == Strategy::SimpleTrack && input.grid && dim_ && input.grid->dim() != *dim_) {
            throw DimensionMismatchError("grid dim " + std::to_string(input.grid->dim()) +
                                         " does not match embedding dim " + std::to_string(*dim_));
        }
    }

    // Advances every live track to `frame` with one predict per elapsed frame.
    void predict_to(std::int64_t frame) {
        const std::int64_t steps = last_frame_ ? frame - *last_frame_ : 0;
        for (auto& t : tracks_) {
            for (std::int64_t k = 0; k < steps; ++k) t.kf = kf_.predict(t.kf);
        }
        last_frame_ = frame;
    }

    StageResult associate(const std::vector<std::size_t>& track_idx, const std::vector<std::size_t>& det_idx,
                          const std::vector<Detection>& dets, Cost kind, double threshold) const {
        StageResult out;
        if (track_idx.empty() || det_idx.empty()) {
            out.unmatched_tracks = track_idx;
            out.unmatched_dets = det_idx;
            return out;
        }
        std::vector<BoundingBox> track_boxes, det_boxes;
        track_boxes.reserve(track_idx.size());
        det_boxes.reserve(det_idx.size());
        for (auto i : track_idx) track_boxes.push_back(predicted_box(tracks_[i].kf));
        for (auto j : det_idx) det_boxes.push_back(dets[j].box);

        CostMatrix cost;
        if (kind == Cost::Iou) {
            cost = iou_cost_matrix(track_boxes, det_boxes);
        } else {
            std::vector<Embedding> track_embs, det_embs;
            track_embs.reserve(track_idx.size());
            det_embs.reserve(det_idx.size());
            for (auto i : track_idx) track_embs.push_back(tracks_[i].embedding);
            for (auto j : det_idx) det_embs.push_back(dets[j].embedding);
            if (kind == Cost::Eg) {
                cost = eg_cost_matrix(track_boxes, track_embs, det_boxes, det_embs,
                                      {config_.lambda1, config_.lambda2});
            } else {
                const CostMatrix appearance = embedding_cost_matrix(track_embs, det_embs);
                CostMatrix motion(track_idx.size(), det_idx.size());
                for (std::size_t r = 0; r < track_idx.size(); ++r) {
                    const auto d = kf_.gating_distance(tracks_[track_idx[r]].kf, det_boxes);
                    for (std::size_t c = 0; c < d.size(); ++c) motion(r, c) = d[c];
                }
                cost = em_fused_cost_matrix(appearance, motion, config_.em_gate, config_.em_weight);
            }
        }

        const AssignmentResult assignment = solve(cost, threshold);
        for (const auto& m : assignment.matches) {
            out.matches.emplace_back(track_idx[static_cast<std::size_t>(m.row_id)],
                                     det_idx[static_cast<std::size_t>(m.col_id)]);
        }
        for (auto r : assignment.unmatched_rows) out.unmatched_tracks.push_back(track_idx[static_cast<std::size_t>(r)]);
        for (auto c : assignment.unmatched_cols) out.unmatched_dets.push_back(det_idx[static_cast<std::size_t>(c)]);
        return out;
    }

    void apply_match(Track& t, const Detection& d, std::int64_t frame, bool update_memory) const {
        t.kf = kf_.update(t.kf, d.box);
        if (update_memory && !d.embedding.empty()) {
            Embedding observed = d.embedding;
            observed.normalize();
            if (t.embedding.dim() != observed.dim()) {
                t.embedding = observed;
            } else {
                auto& mem = t.embedding.mutable_values();
                const auto obs = observed.values();
                for (std::size_t k = 0; k < mem.size(); ++k) {
                    mem[k] = config_.ema_alpha * mem[k] + (1.0 - config_.ema_alpha) * obs[k];
                }
                t.embedding.normalize();
            }
        }
        t.state = TrackState::Tracked;
        t.score = d.score;
        t.last_frame = frame;
        t.lost_age = 0;
    }

    Track start_track(const Detection& d, std::int64_t frame) {
        Track t;
        t.id = next_id_++;
        t.kf = kf_.initiate(d.box);
        t.embedding = d.embedding;
        t.embedding.normalize();
        t.state = TrackState::Tracked;
        t.score = d.score;
        t.last_frame = frame;
        t.lost_age = 0;
        return t;
    }

    std::vector<TrackOutput> run(const FrameInput& input, Strategy strategy) {
        validate(input, strategy);
        stats_ = {};
        predict_to(input.frame);
        const auto& dets = input.detections;

        std::vector<std::size_t> high, low;
        for (std::size_t j = 0; j < dets.size(); ++j) {
            if (dets[j].score > config_.tau_high) {
                high.push_back(j);
            } else if (dets[j].score > config_.tau_low && strategy != Strategy::Jde) {
                low.push_back(j);
            }
        }
        stats_.high_detections = high.size();
        stats_.low_detections = low.size();

        std::vector<std::size_t> live(tracks_.size());
        for (std::size_t i = 0; i < tracks_.size(); ++i) live[i] = i;
        std::vector<char> matched(tracks_.size(), 0);

        // First association: every live track against confident detections.
        const Cost first_cost = strategy == Strategy::SimpleTrack ? Cost::Eg
                                : strategy == Strategy::Byte      ? Cost::Iou
                                                                  : Cost::Em;
        StageResult first = associate(live, high, dets, first_cost, config_.match_thresh_high);
        for (auto [ti, dj] : first.matches) {
            apply_match(tracks_[ti], dets[dj], input.frame, true);
            matched[ti] = 1;
        }
        stats_.first_stage_matches = first.matches.size();

        // Second association.
        std::vector<std::size_t> remaining_dets = first.unmatched_dets;
        if (strategy == Strategy::Jde) {
            // Tracks that were tracked before this frame, against leftover confident detections.
            std::vector<std::size_t> candidates;
            for (auto ti : first.unmatched_tracks) {
                if (tracks_[ti].state == TrackState::Tracked) candidates.push_back(ti);
            }
            StageResult second = associate(candidates, first.unmatched_dets, dets, Cost::Iou, config_.jde_iou_thresh);
            for (auto [ti, dj] : second.matches) {
                apply_match(tracks_[ti], dets[dj], input.frame, false);
                matched[ti] = 1;
            }
            stats_.second_stage_matches = second.matches.size();
            remaining_dets = second.unmatched_dets;
        } else {
            const Cost second_cost = strategy == Strategy::SimpleTrack ? Cost::Eg : Cost::Iou;
            StageResult second = associate(first.unmatched_tracks, low, dets, second_cost, config_.match_thresh_low);
            for (auto [ti, dj] : second.matches) {
                apply_match(tracks_[ti], dets[dj], input.frame, false);
                matched[ti] = 1;
            }
            stats_.second_stage_matches = second.matches.size();
        }

        // Tracking retrieval on what is still unmatched.
        if (strategy == Strategy::SimpleTrack && config_.retrieval_enabled && input.grid) {
            std::vector<Track*> candidates;
            for (std::size_t i = 0; i < tracks_.size(); ++i) {
                if (!matched[i]) candidates.push_back(&tracks_[i]);
            }
            const auto recovered = retrieve_lost(candidates, *input.grid, config_.eps_retrieval, input.frame);
            for (std::size_t i = 0; i < tracks_.size(); ++i) {
                if (!matched[i] && std::find(recovered.begin(), recovered.end(), tracks_[i].id) != recovered.end()) {
                    matched[i] = 1;
                }
            }
            stats_.retrieved = recovered.size();
        }

        // Lifecycle of unmatched tracks.
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            if (matched[i]) continue;
            Track& t = tracks_[i];
            t.state = TrackState::Lost;
            t.lost_age = input.frame - t.last_frame;
            if (t.lost_age > config_.max_time_lost) t.state = TrackState::Removed;
        }
        for (const auto& t : tracks_) {
            if (t.state == TrackState::Removed) removed_ids_.push_back(t.id);
        }
        const auto before = tracks_.size();
        std::erase_if(tracks_, [](const Track& t) { return t.state == TrackState::Removed; });
        stats_.removed = before - tracks_.size();

        // New tracks from confident detections nobody claimed.
        for (auto dj : remaining_dets) {
            if (dets[dj].score > config_.eps_init) {
                tracks_.push_back(start_track(dets[dj], input.frame));
                ++stats_.new_tracks;
            }
        }

        std::vector<TrackOutput> out;
        for (const auto& t : tracks_) {
            if (t.state == TrackState::Tracked) out.push_back({t.id, predicted_box(t.kf), t.score});
        }
        return out;
    }

    TrackerConfig config_;
    KalmanFilter kf_;
    std::vector<Track> tracks_;  // live tracks in creation (= id) order
    std::vector<std::int64_t> removed_ids_;
    std::int64_t next_id_ = 1;
    std::optional<std::int64_t> last_frame_;
    std::optional<std::size_t> dim_;
    StepStats stats_;
};

}  // namespace simpletrack
