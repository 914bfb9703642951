// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#pragma once

// Timing harness for association cost-matrix construction.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "simpletrack/geometry.hpp"
#include "simpletrack/kalman.hpp"
#include "simpletrack/synth.hpp"

namespace simpletrack {

struct BenchReport {
    std::size_t num_tracks = 0;
    std::size_t num_dets = 0;
    std::size_t emb_dim = 0;
    std::size_t iterations = 0;
    double eg_ns = 0.0;   // median ns per EG matrix
    double em_ns = 0.0;   // median ns per EM matrix (appearance + gating + fusion)
    double iou_ns = 0.0;  // median ns per IoU matrix
};

/// Random association problem shared by every method in a benchmark run.
struct BenchInput {
    std::vector<BoundingBox> track_boxes;
    std::vector<Embedding> track_embs;
    std::vector<KalmanState> track_states;
    std::vector<BoundingBox> det_boxes;
    std::vector<Embedding> det_embs;
};

inline BenchInput make_bench_input(std::size_t num_tracks, std::size_t num_dets, std::size_t emb_dim,
                                   std::uint64_t seed, const KalmanFilter& kf = KalmanFilter{}) {
    Random rng(seed);
    BenchInput in;
    auto random_box = [&] {
        const double w = rng.uniform(20.0, 80.0);
        return BoundingBox::from_center(rng.uniform(0.0, 1920.0), rng.uniform(0.0, 1080.0), w, 2.0 * w);
    };
    for (std::size_t i = 0; i < num_tracks; ++i) {
        const auto box = random_box();
        in.track_boxes.push_back(box);
        in.track_embs.emplace_back(rng.unit_vector(emb_dim));
        KalmanState s = kf.initiate(box);
        s = kf.update(kf.predict(s), box);
        in.track_states.push_back(kf.predict(s));
    }
    for (std::size_t j = 0; j < num_dets; ++j) {
        in.det_boxes.push_back(random_box());
        in.det_embs.emplace_back(rng.unit_vector(emb_dim));
    }
    return in;
}

/// EM matrix exactly as the JDE-family trackers build it: appearance cost,
/// Mahalanobis gating per track, then fusion.
inline CostMatrix build_em_matrix(const BenchInput& in, const KalmanFilter& kf,
                                  double weight = kDefaultEmWeight, double gate = kChi2Gate4Dof) {
    const CostMatrix appearance = embedding_cost_matrix(in.track_embs, in.det_embs);
    CostMatrix motion(in.track_states.size(), in.det_boxes.size());
    for (std::size_t r = 0; r < in.track_states.size(); ++r) {
        const auto d = kf.gating_distance(in.track_states[r], in.det_boxes);
        for (std::size_t c = 0; c < d.size(); ++c) motion(r, c) = d[c];
    }
    return em_fused_cost_matrix(appearance, motion, gate, weight);
}

namespace bench_detail {

template <class Fn>
double median_ns(Fn&& fn, std::size_t iterations, std::size_t warmup, double& sink) {
    for (std::size_t k = 0; k < warmup; ++k) sink += fn();
    std::vector<double> samples;
    samples.reserve(iterations);
    for (std::size_t k = 0; k < iterations; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        sink += fn();
        const auto t1 = std::chrono::steady_clock::now();
        samples.push_back(static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()));
    }
    std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(samples.size() / 2), samples.end());
    return samples[samples.size() / 2];
}

inline double checksum(const CostMatrix& m) {
    return m.empty() ? 0.0 : m(0, 0) + m(m.rows() - 1, m.cols() - 1);
}

}  // namespace bench_detail

/// Median wall time of constructing each matrix over `iterations` runs after
/// `warmup` discarded runs, all methods on the same random input.
inline BenchReport bench_costs(std::size_t num_tracks, std::size_t num_dets, std::size_t emb_dim,
                               std::size_t iterations = 101, std::uint64_t seed = 0, std::size_t warmup = 10) {
    if (num_tracks < 1 || num_dets < 1 || emb_dim < 1 || iterations < 1) {
        throw std::invalid_argument("bench sizes must be >= 1");
    }
    const KalmanFilter kf;
    const BenchInput in = make_bench_input(num_tracks, num_dets, emb_dim, seed, kf);
    double sink = 0.0;
    BenchReport r{num_tracks, num_dets, emb_dim, iterations};
    r.eg_ns = bench_detail::median_ns(
        [&] { return bench_detail::checksum(eg_cost_matrix(in.track_boxes, in.track_embs, in.det_boxes, in.det_embs)); },
        iterations, warmup, sink);
    r.em_ns = bench_detail::median_ns([&] { return bench_detail::checksum(build_em_matrix(in, kf)); }, iterations,
                                      warmup, sink);
    r.iou_ns = bench_detail::median_ns(
        [&] { return bench_detail::checksum(iou_cost_matrix(in.track_boxes, in.det_boxes)); }, iterations, warmup, sink);
    // Keeps the work observable.
    volatile double keep = sink;
    (void)keep;
    return r;
}

}  // namespace simpletrack
