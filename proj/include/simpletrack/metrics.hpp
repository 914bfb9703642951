// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#pragma once

// CLEAR-MOT (MOTA, FP, FN, IDsw) and identity metrics (IDF1, IDP, IDR).

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "simpletrack/assignment.hpp"
#include "simpletrack/error.hpp"
#include "simpletrack/geometry.hpp"
#include "simpletrack/mot_io.hpp"

namespace simpletrack {

struct MetricsReport {
    double mota = 0.0;
    double idf1 = 0.0;
    double idp = 0.0;
    double idr = 0.0;
    std::int64_t idsw = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t num_gt = 0;
    std::int64_t num_res = 0;
    std::int64_t matches = 0;
    std::int64_t idtp = 0;
    std::int64_t idfp = 0;
    std::int64_t idfn = 0;
    std::optional<double> hota;  // reserved; never filled by this evaluator

    /// Recomputes the ratios from the counters.
    void finalize() {
        if (num_gt <= 0) throw EvaluationError("MOTA is undefined without ground-truth objects");
        mota = 1.0 - static_cast<double>(fp + fn + idsw) / static_cast<double>(num_gt);
        idp = num_res > 0 ? static_cast<double>(idtp) / static_cast<double>(idtp + idfp) : 0.0;
        idr = static_cast<double>(idtp) / static_cast<double>(idtp + idfn);
        idf1 = static_cast<double>(2 * idtp) / static_cast<double>(2 * idtp + idfp + idfn);
    }

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

namespace metrics_detail {

struct FrameIndex {
    std::map<std::int64_t, std::vector<std::size_t>> gt;
    std::map<std::int64_t, std::vector<std::size_t>> res;
};

// Distance 1 - IoU, used for both per-frame matching and identity overlaps.
inline double iou_distance(const BoundingBox& a, const BoundingBox& b) { return 1.0 - iou(a, b); }

}  // namespace metrics_detail

/// Scores `res` against `gt`. A result box can match a ground-truth box when
/// IoU >= iou_threshold.
///
/// CLEAR: frames are processed in order. A pairing made in an earlier frame is
/// kept when both objects are present and still within the gate; the rest are
/// matched by minimum-distance assignment. A switch is counted when a
/// ground-truth identity is matched to a result id different from the one it
/// was last matched to.
///
/// IDF1: one global bipartite matching between ground-truth and result
/// trajectories maximizing the number of frames where the paired boxes match.
inline MetricsReport evaluate(const GroundTruth& gt, std::span<const ResultRecord> res, double iou_threshold = 0.5) {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
        throw std::invalid_argument("iou threshold must lie in (0, 1)");
    }
    if (gt.records.empty()) throw EvaluationError("ground truth is empty; MOTA is undefined");
    const double gate = 1.0 - iou_threshold;

    metrics_detail::FrameIndex index;
    for (std::size_t i = 0; i < gt.records.size(); ++i) index.gt[gt.records[i].frame].push_back(i);
    for (std::size_t i = 0; i < res.size(); ++i) index.res[res[i].frame].push_back(i);
    std::vector<std::int64_t> frames;
    for (const auto& [f, _] : index.gt) frames.push_back(f);
    for (const auto& [f, _] : index.res) frames.push_back(f);
    std::sort(frames.begin(), frames.end());
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());

    // Dense ids for the identity overlap table.
    std::map<std::int64_t, std::size_t> gt_slot, res_slot;
    for (const auto& r : gt.records) gt_slot.emplace(r.id, 0);
    for (const auto& r : res) res_slot.emplace(r.id, 0);
    std::size_t k = 0;
    for (auto& [id, slot] : gt_slot) slot = k++;
    k = 0;
    for (auto& [id, slot] : res_slot) slot = k++;
    std::vector<std::int64_t> overlap(gt_slot.size() * res_slot.size(), 0);

    MetricsReport report;
    std::map<std::int64_t, std::int64_t> last_match;  // gt id -> result id
    static const std::vector<std::size_t> kNone;

    for (const auto frame : frames) {
        const auto git = index.gt.find(frame);
        const auto rit = index.res.find(frame);
        const auto& gts = git != index.gt.end() ? git->second : kNone;
        const auto& hyps = rit != index.res.end() ? rit->second : kNone;

        std::vector<double> dist(gts.size() * hyps.size());
        for (std::size_t a = 0; a < gts.size(); ++a) {
            for (std::size_t b = 0; b < hyps.size(); ++b) {
                const double d = metrics_detail::iou_distance(gt.records[gts[a]].box, res[hyps[b]].box);
                dist[a * hyps.size() + b] = d;
                if (d <= gate) {
                    ++overlap[gt_slot[gt.records[gts[a]].id] * res_slot.size() + res_slot[res[hyps[b]].id]];
                }
            }
        }

        std::vector<std::int64_t> gt_match(gts.size(), -1);
        std::vector<char> hyp_used(hyps.size(), 0);

        // Carry-over of persisting pairs.
        std::vector<std::size_t> order(gts.size());
        for (std::size_t a = 0; a < gts.size(); ++a) order[a] = a;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t x, std::size_t y) { return gt.records[gts[x]].id < gt.records[gts[y]].id; });
        for (auto a : order) {
            const auto lm = last_match.find(gt.records[gts[a]].id);
            if (lm == last_match.end()) continue;
            for (std::size_t b = 0; b < hyps.size(); ++b) {
                if (!hyp_used[b] && res[hyps[b]].id == lm->second && dist[a * hyps.size() + b] <= gate) {
                    gt_match[a] = static_cast<std::int64_t>(b);
                    hyp_used[b] = 1;
                    break;
                }
            }
        }

        // Minimum-distance assignment of the rest.
        std::vector<std::int64_t> free_gt, free_hyp;
        for (std::size_t a = 0; a < gts.size(); ++a) {
            if (gt_match[a] < 0) free_gt.push_back(static_cast<std::int64_t>(a));
        }
        for (std::size_t b = 0; b < hyps.size(); ++b) {
            if (!hyp_used[b]) free_hyp.push_back(static_cast<std::int64_t>(b));
        }
        if (!free_gt.empty() && !free_hyp.empty()) {
            CostMatrix cost(free_gt, free_hyp);
            for (std::size_t a = 0; a < free_gt.size(); ++a) {
                for (std::size_t b = 0; b < free_hyp.size(); ++b) {
                    cost(a, b) = dist[static_cast<std::size_t>(free_gt[a]) * hyps.size() +
                                      static_cast<std::size_t>(free_hyp[b])];
                }
            }
            for (const auto& m : solve(cost, gate).matches) {
                gt_match[static_cast<std::size_t>(m.row_id)] = m.col_id;
                hyp_used[static_cast<std::size_t>(m.col_id)] = 1;
            }
        }

        std::int64_t matched = 0;
        for (std::size_t a = 0; a < gts.size(); ++a) {
            if (gt_match[a] < 0) continue;
            ++matched;
            const auto gid = gt.records[gts[a]].id;
            const auto hid = res[hyps[static_cast<std::size_t>(gt_match[a])]].id;
            auto [it, inserted] = last_match.emplace(gid, hid);
            if (!inserted && it->second != hid) {
                ++report.idsw;
                it->second = hid;
            }
        }
        report.matches += matched;
        report.fn += static_cast<std::int64_t>(gts.size()) - matched;
        report.fp += static_cast<std::int64_t>(hyps.size()) - matched;
        report.num_gt += static_cast<std::int64_t>(gts.size());
        report.num_res += static_cast<std::int64_t>(hyps.size());
    }

    // Identity matching: maximize the total overlap count.
    const std::size_t ng = gt_slot.size();
    const std::size_t nr = res_slot.size();
    std::int64_t best = 0;
    for (auto v : overlap) best = std::max(best, v);
    if (ng > 0 && nr > 0 && best > 0) {
        CostMatrix cost(ng, nr);
        for (std::size_t a = 0; a < ng; ++a) {
            for (std::size_t b = 0; b < nr; ++b) cost(a, b) = static_cast<double>(best - overlap[a * nr + b]);
        }
        for (const auto& m : solve(cost, static_cast<double>(best)).matches) {
            report.idtp += overlap[static_cast<std::size_t>(m.row_id) * nr + static_cast<std::size_t>(m.col_id)];
        }
    }
    report.idfn = report.num_gt - report.idtp;
    report.idfp = report.num_res - report.idtp;
    report.finalize();
    return report;
}

/// Sums counters over sequences and recomputes the ratios.
inline MetricsReport aggregate(std::span<const MetricsReport> reports) {
    MetricsReport total;
    for (const auto& r : reports) {
        total.idsw += r.idsw;
        total.fp += r.fp;
        total.fn += r.fn;
        total.num_gt += r.num_gt;
        total.num_res += r.num_res;
        total.matches += r.matches;
        total.idtp += r.idtp;
        total.idfp += r.idfp;
        total.idfn += r.idfn;
    }
    total.finalize();
    return total;
}

namespace metrics_detail {

inline std::string fixed3(double v) {
    std::string s;
    io_detail::append_fixed(s, v, 3);
    return s;
}

inline std::string fixed6(double v) {
    std::string s;
    io_detail::append_fixed(s, v, 6);
    return s;
}

}  // namespace metrics_detail

/// One-line summary, e.g. "MOTA=1.000  IDF1=1.000  ...".
inline std::string format_report_text(const MetricsReport& r) {
    using metrics_detail::fixed3;
    std::ostringstream os;
    os << "MOTA=" << fixed3(r.mota) << "  IDF1=" << fixed3(r.idf1) << "  IDP=" << fixed3(r.idp)
       << "  IDR=" << fixed3(r.idr) << "  IDsw=" << r.idsw << "  FP=" << r.fp << "  FN=" << r.fn
       << "  GT=" << r.num_gt << "  RES=" << r.num_res;
    if (r.hota) os << "  HOTA=" << fixed3(*r.hota);
    return os.str();
}

/// Aligned table with a header row; one row per named report.
inline std::string format_report_table(std::span<const std::pair<std::string, MetricsReport>> rows) {
    using metrics_detail::fixed3;
    std::size_t name_width = 8;
    for (const auto& [name, _] : rows) name_width = std::max(name_width, name.size());
    std::ostringstream os;
    auto pad = [](const std::string& s, std::size_t w, bool left) {
        if (s.size() >= w) return s;
        return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
    };
    os << pad("sequence", name_width, true);
    for (const char* h : {"MOTA", "IDF1", "IDP", "IDR", "IDsw", "FP", "FN", "GT"}) os << ' ' << pad(h, 7, false);
    os << '\n';
    for (const auto& [name, r] : rows) {
        os << pad(name, name_width, true) << ' ' << pad(fixed3(r.mota), 7, false) << ' '
           << pad(fixed3(r.idf1), 7, false) << ' ' << pad(fixed3(r.idp), 7, false) << ' '
           << pad(fixed3(r.idr), 7, false) << ' ' << pad(std::to_string(r.idsw), 7, false) << ' '
           << pad(std::to_string(r.fp), 7, false) << ' ' << pad(std::to_string(r.fn), 7, false) << ' '
           << pad(std::to_string(r.num_gt), 7, false) << '\n';
    }
    return os.str();
}

/// Machine-readable "key=value" lines.
inline void write_report_kv(std::ostream& os, const MetricsReport& r) {
    using metrics_detail::fixed6;
    os << "mota=" << fixed6(r.mota) << '\n'
       << "idf1=" << fixed6(r.idf1) << '\n'
       << "idp=" << fixed6(r.idp) << '\n'
       << "idr=" << fixed6(r.idr) << '\n'
       << "idsw=" << r.idsw << '\n'
       << "fp=" << r.fp << '\n'
       << "fn=" << r.fn << '\n'
       << "num_gt=" << r.num_gt << '\n'
       << "num_res=" << r.num_res << '\n'
       << "matches=" << r.matches << '\n'
       << "idtp=" << r.idtp << '\n'
       << "idfp=" << r.idfp << '\n'
       << "idfn=" << r.idfn << '\n';
    if (r.hota) os << "hota=" << fixed6(*r.hota) << '\n';
}

}  // namespace simpletrack
