// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#pragma once

// Box geometry and the association cost matrices built on top of it:
// IoU, GIoU distance, embedding cosine distance, the embedding+GIoU (EG)
// fusion and the embedding+motion (EM) baseline fusion.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "simpletrack/error.hpp"
#include "simpletrack/logging.hpp"

namespace simpletrack {

/// Axis-aligned pixel rectangle stored as top-left corner plus size, the
/// layout used by MOTChallenge files.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    static BoundingBox from_center(double cx, double cy, double w, double h) {
        return {cx - w / 2.0, cy - h / 2.0, w, h};
    }

    double left() const noexcept { return x; }
    double top() const noexcept { return y; }
    double right() const noexcept { return x + w; }
    double bottom() const noexcept { return y + h; }
    double center_x() const noexcept { return x + w / 2.0; }
    double center_y() const noexcept { return y + h / 2.0; }

    // Area is taken from the corner differences so that it agrees bit for
    // bit with the intersection of a box with itself.
    double area() const noexcept { return (right() - left()) * (bottom() - top()); }

    bool is_valid() const noexcept {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) &&
               w > 0.0 && h > 0.0;
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const BoundingBox& b) {
    return os << '(' << b.x << ',' << b.y << ',' << b.w << ',' << b.h << ')';
}

inline void require_valid(const BoundingBox& b) {
    if (!b.is_valid()) {
        throw InvalidBoxError("invalid box (x=" + std::to_string(b.x) + ", y=" + std::to_string(b.y) +
                              ", w=" + std::to_string(b.w) + ", h=" + std::to_string(b.h) + ")");
    }
}

/// Appearance embedding. Entries are stored in double precision; the dense
/// embedding grid keeps single-precision floats and the cosine routines accept
/// either through spans.
class Embedding {
public:
    Embedding() = default;
    explicit Embedding(std::vector<double> values) : values_(std::move(values)) {}
    Embedding(std::initializer_list<double> values) : values_(values) {}

    std::size_t dim() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& mutable_values() noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    double norm() const noexcept {
        double sq = 0.0;
        for (double v : values_) sq += v * v;
        return std::sqrt(sq);
    }

    /// Scales to unit norm. Zero vectors are left untouched.
    void normalize() noexcept {
        const double n = norm();
        if (n > 0.0 && std::isfinite(n)) {
            for (double& v : values_) v /= n;
        }
    }

    friend bool operator==(const Embedding&, const Embedding&) = default;

private:
    std::vector<double> values_;
};

/// Rows are tracks, columns are detections. Infeasible pairs hold
/// `kInfeasible` (+inf), which compares greater than any finite cost.
class CostMatrix {
public:
    static constexpr double kInfeasible = std::numeric_limits<double>::infinity();

    CostMatrix() = default;

    CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), entries_(rows * cols, fill), row_ids_(rows), col_ids_(cols) {
        for (std::size_t i = 0; i < rows; ++i) row_ids_[i] = static_cast<std::int64_t>(i);
        for (std::size_t j = 0; j < cols; ++j) col_ids_[j] = static_cast<std::int64_t>(j);
    }

    CostMatrix(std::vector<std::int64_t> row_ids, std::vector<std::int64_t> col_ids, double fill = 0.0)
        : rows_(row_ids.size()),
          cols_(col_ids.size()),
          entries_(rows_ * cols_, fill),
          row_ids_(std::move(row_ids)),
          col_ids_(std::move(col_ids)) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    bool is_feasible(std::size_t r, std::size_t c) const { return (*this)(r, c) != kInfeasible; }

    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(entries_).subspan(r * cols_, cols_);
    }
    std::span<const double> entries() const noexcept { return entries_; }

    const std::vector<std::int64_t>& row_ids() const noexcept { return row_ids_; }
    const std::vector<std::int64_t>& col_ids() const noexcept { return col_ids_; }

    void set_row_ids(std::vector<std::int64_t> ids) {
        if (ids.size() != rows_) throw DimensionMismatchError("row id count does not match rows");
        row_ids_ = std::move(ids);
    }
    void set_col_ids(std::vector<std::int64_t> ids) {
        if (ids.size() != cols_) throw DimensionMismatchError("column id count does not match cols");
        col_ids_ = std::move(ids);
    }

    /// Every entry is either INFEASIBLE or a finite non-negative number.
    bool is_well_formed() const noexcept {
        return std::all_of(entries_.begin(), entries_.end(), [](double v) {
            return v == kInfeasible || (std::isfinite(v) && v >= 0.0);
        });
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
    std::vector<std::int64_t> row_ids_;
    std::vector<std::int64_t> col_ids_;
};

/// One CSV line per row; infeasible entries are written as "inf".
inline std::ostream& operator<<(std::ostream& os, const CostMatrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) os << ',';
            if (m.is_feasible(r, c)) {
                os << m(r, c);
            } else {
                os << "inf";
            }
        }
        os << '\n';
    }
    return os;
}

// ---------------------------------------------------------------------------
// Scalar similarities

inline double iou(const BoundingBox& a, const BoundingBox& b) {
    require_valid(a);
    require_valid(b);
    const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = (a.area() + b.area()) - inter;
    return std::clamp(inter / uni, 0.0, 1.0);
}

/// 1 - GIoU, in [0, 2). Zero exactly when the boxes coincide.
inline double giou_distance(const BoundingBox& a, const BoundingBox& b) {
    require_valid(a);
    require_valid(b);
    const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
    const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
    const double uni = (a.area() + b.area()) - inter;
    const double cw = std::max(a.right(), b.right()) - std::min(a.left(), b.left());
    const double ch = std::max(a.bottom(), b.bottom()) - std::min(a.top(), b.top());
    const double enclosing = cw * ch;
    const double giou = inter / uni - (enclosing - uni) / enclosing;
    return std::max(0.0, 1.0 - giou);
}

namespace detail {

// Four independent partial sums so the adds pipeline. Fixed order, so the
// result is deterministic.
template <class T, class U>
double dot(std::span<const T> a, std::span<const U> b) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    const std::size_t n = a.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
        s1 += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
        s2 += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
        s3 += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
    }
    for (; i < n; ++i) s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return (s0 + s1) + (s2 + s3);
}

template <class T>
double squared_norm(std::span<const T> v) {
    return dot(v, v);
}

// 1 - a.b / (|a||b|) with pre-computed norms, clamped to [0, 2].
inline double cosine_from_parts(double dot, double norm_a, double norm_b) {
    return std::clamp(1.0 - dot / (norm_a * norm_b), 0.0, 2.0);
}

template <class T>
double checked_norm(std::span<const T> v) {
    const double n = std::sqrt(squared_norm(v));
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw DegenerateEmbeddingError("embedding has zero or non-finite norm");
    }
    return n;
}

}  // namespace detail

/// 1 - cos(e1, e2), in [0, 2].
template <class T, class U>
double cosine_distance(std::span<const T> e1, std::span<const U> e2) {
    if (e1.size() != e2.size()) {
        throw DimensionMismatchError("embedding dimensions differ (" + std::to_string(e1.size()) + " vs " +
                                     std::to_string(e2.size()) + ")");
    }
    const double n1 = detail::checked_norm(e1);
    const double n2 = detail::checked_norm(e2);
    return detail::cosine_from_parts(detail::dot(e1, e2), n1, n2);
}

inline double cosine_distance(const Embedding& e1, const Embedding& e2) {
    return cosine_distance(e1.values(), e2.values());
}

// ---------------------------------------------------------------------------
// Cost matrices

/// Box plus appearance, the unit both sides of an EG matrix are built from.
struct Observation {
    BoundingBox box;
    Embedding embedding;
};

/// Weights of the EG fusion: cost = appearance * cosine + location * giou.
struct EgWeights {
    double appearance = 1.0;
    double location = 0.5;
};

namespace detail {

// Tallies per-entry failures and reports them once per matrix.
class EntryFailureLog {
public:
    explicit EntryFailureLog(const char* matrix) : matrix_(matrix) {}
    EntryFailureLog(const EntryFailureLog&) = delete;
    EntryFailureLog& operator=(const EntryFailureLog&) = delete;
    ~EntryFailureLog() {
        if (count_ > 0) {
            log_warning(std::string(matrix_) + ": " + std::to_string(count_) +
                        " entries marked infeasible; first error: " + first_);
        }
    }
    void record(const std::exception& e) {
        if (count_++ == 0) first_ = e.what();
    }

private:
    const char* matrix_;
    std::size_t count_ = 0;
    std::string first_;
};

// Norm of each embedding, or NaN when it cannot take part in a cosine.
inline std::vector<double> embedding_norms(std::span<const Embedding> embs) {
    std::vector<double> norms(embs.size());
    for (std::size_t i = 0; i < embs.size(); ++i) {
        const double n = std::sqrt(squared_norm(embs[i].values()));
        norms[i] = (n > 0.0 && std::isfinite(n)) ? n : std::numeric_limits<double>::quiet_NaN();
    }
    return norms;
}

template <class Fn>
CostMatrix box_cost_matrix(std::span<const BoundingBox> tracks, std::span<const BoundingBox> dets,
                           const char* name, Fn&& distance) {
    CostMatrix m(tracks.size(), dets.size());
    EntryFailureLog failures(name);
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        for (std::size_t j = 0; j < dets.size(); ++j) {
            try {
                m(i, j) = distance(tracks[i], dets[j]);
            } catch (const Error& e) {
                failures.record(e);
                m(i, j) = CostMatrix::kInfeasible;
            }
        }
    }
    return m;
}

}  // namespace detail

inline CostMatrix iou_cost_matrix(std::span<const BoundingBox> tracks, std::span<const BoundingBox> dets) {
    return detail::box_cost_matrix(tracks, dets, "iou_cost_matrix",
                                   [](const BoundingBox& a, const BoundingBox& b) { return 1.0 - iou(a, b); });
}

inline CostMatrix giou_cost_matrix(std::span<const BoundingBox> tracks, std::span<const BoundingBox> dets) {
    return detail::box_cost_matrix(tracks, dets, "giou_cost_matrix",
                                   [](const BoundingBox& a, const BoundingBox& b) { return giou_distance(a, b); });
}

inline CostMatrix embedding_cost_matrix(std::span<const Embedding> tracks, std::span<const Embedding> dets) {
    CostMatrix m(tracks.size(), dets.size());
    if (m.empty()) return m;
    detail::EntryFailureLog failures("embedding_cost_matrix");
    const auto track_norms = detail::embedding_norms(tracks);
    const auto det_norms = detail::embedding_norms(dets);
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        for (std::size_t j = 0; j < dets.size(); ++j) {
            if (tracks[i].dim() != dets[j].dim()) {
                failures.record(DimensionMismatchError("embedding dimensions differ"));
                m(i, j) = CostMatrix::kInfeasible;
            } else if (std::isnan(track_norms[i]) || std::isnan(det_norms[j])) {
                failures.record(DegenerateEmbeddingError("embedding has zero or non-finite norm"));
                m(i, j) = CostMatrix::kInfeasible;
            } else {
                m(i, j) = detail::cosine_from_parts(detail::dot(tracks[i].values(), dets[j].values()),
                                                    track_norms[i], det_norms[j]);
            }
        }
    }
    return m;
}

/// EG matrix: weights.appearance * cosine_distance + weights.location * giou_distance.
/// Entries whose box or embedding is unusable become INFEASIBLE.
inline CostMatrix eg_cost_matrix(std::span<const BoundingBox> track_boxes, std::span<const Embedding> track_embs,
                                 std::span<const BoundingBox> det_boxes, std::span<const Embedding> det_embs,
                                 EgWeights weights = {}) {
    if (track_boxes.size() != track_embs.size() || det_boxes.size() != det_embs.size()) {
        throw DimensionMismatchError("eg_cost_matrix: box and embedding counts differ");
    }
    if (!(weights.appearance >= 0.0) || !(weights.location >= 0.0)) {
        throw std::invalid_argument("eg_cost_matrix: weights must be non-negative");
    }
    CostMatrix m = embedding_cost_matrix(track_embs, det_embs);
    if (m.empty()) return m;
    detail::EntryFailureLog failures("eg_cost_matrix");
    for (std::size_t i = 0; i < track_boxes.size(); ++i) {
        for (std::size_t j = 0; j < det_boxes.size(); ++j) {
            double& entry = m(i, j);
            if (entry == CostMatrix::kInfeasible) continue;
            try {
                entry = weights.appearance * entry + weights.location * giou_distance(track_boxes[i], det_boxes[j]);
            } catch (const Error& e) {
                failures.record(e);
                entry = CostMatrix::kInfeasible;
            }
        }
    }
    return m;
}

inline CostMatrix eg_cost_matrix(std::span<const Observation> tracks, std::span<const Observation> dets,
                                 EgWeights weights = {}) {
    std::vector<BoundingBox> tb, db;
    std::vector<Embedding> te, de;
    tb.reserve(tracks.size());
    te.reserve(tracks.size());
    for (const auto& t : tracks) {
        tb.push_back(t.box);
        te.push_back(t.embedding);
    }
    db.reserve(dets.size());
    de.reserve(dets.size());
    for (const auto& d : dets) {
        db.push_back(d.box);
        de.push_back(d.embedding);
    }
    return eg_cost_matrix(tb, te, db, de, weights);
}

/// 0.95 quantile of the chi-square distribution with 4 degrees of freedom,
/// the customary gate on squared Mahalanobis distance of (cx, cy, a, h).
inline constexpr double kChi2Gate4Dof = 9.4877;

/// Appearance weight of the EM fusion used by the JDE-family trackers.
inline constexpr double kDefaultEmWeight = 0.98;

/// EM baseline: weight * appearance + (1 - weight) * motion / gate_threshold for
/// pairs inside the motion gate; pairs outside it become INFEASIBLE.
inline CostMatrix em_fused_cost_matrix(const CostMatrix& emb_cost, const CostMatrix& motion,
                                       double gate_threshold = kChi2Gate4Dof,
                                       double weight = kDefaultEmWeight) {
    if (emb_cost.rows() != motion.rows() || emb_cost.cols() != motion.cols()) {
        throw DimensionMismatchError("em_fused_cost_matrix: shape mismatch (" + std::to_string(emb_cost.rows()) +
                                     "x" + std::to_string(emb_cost.cols()) + " vs " +
                                     std::to_string(motion.rows()) + "x" + std::to_string(motion.cols()) + ")");
    }
    if (!(gate_threshold > 0.0)) throw std::invalid_argument("em_fused_cost_matrix: gate must be positive");
    if (!(weight >= 0.0 && weight <= 1.0)) throw std::invalid_argument("em_fused_cost_matrix: weight not in [0,1]");
    CostMatrix fused = emb_cost;
    for (std::size_t i = 0; i < fused.rows(); ++i) {
        for (std::size_t j = 0; j < fused.cols(); ++j) {
            double& entry = fused(i, j);
            const double m = motion(i, j);
            if (entry == CostMatrix::kInfeasible || !(m <= gate_threshold)) {
                entry = CostMatrix::kInfeasible;
            } else {
                entry = weight * entry + (1.0 - weight) * (m / gate_threshold);
            }
        }
    }
    return fused;
}

}  // namespace simpletrack
