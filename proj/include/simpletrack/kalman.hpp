// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "simpletrack/error.hpp"
#include "simpletrack/geometry.hpp"

namespace simpletrack {

using Vector4d = Eigen::Matrix<double, 4, 1>;
using Vector8d = Eigen::Matrix<double, 8, 1>;
using Matrix4d = Eigen::Matrix<double, 4, 4>;
using Matrix8d = Eigen::Matrix<double, 8, 8>;
using Matrix48d = Eigen::Matrix<double, 4, 8>;

/// Mean [cx, cy, a, h, vcx, vcy, va, vh] (center, aspect w/h, height and their
/// per-frame velocities) with its 8x8 covariance.
struct KalmanState {
    Vector8d mean = Vector8d::Zero();
    Matrix8d covariance = Matrix8d::Identity();
    // Box the position part of the mean was taken from, if any. (cx, cy, a, h)
    // does not map back to (x, y, w, h) exactly in floating point, so the
    // source box is kept for as long as the mean still equals its measurement.
    std::optional<BoundingBox> source_box;
};

/// Noise model of the constant-velocity filter. Standard deviations scale with
/// the box height; the two scale factors switch process (Q) and measurement (R)
/// noise off for noise-free experiments.
struct KalmanNoise {
    double std_weight_position = 1.0 / 20.0;
    double std_weight_velocity = 1.0 / 160.0;
    double process_scale = 1.0;
    double measurement_scale = 1.0;
};

/// Measurement vector (cx, cy, a, h) of a box.
inline Vector4d to_measurement(const BoundingBox& box) {
    require_valid(box);
    return {box.center_x(), box.center_y(), box.w / box.h, box.h};
}

/// Constant-velocity Kalman filter over (cx, cy, a, h), one frame per step.
class KalmanFilter {
public:
    explicit KalmanFilter(KalmanNoise noise = {}) : noise_(noise) {
        transition_.setIdentity();
        for (int i = 0; i < 4; ++i) transition_(i, 4 + i) = 1.0;
        observation_.setZero();
        for (int i = 0; i < 4; ++i) observation_(i, i) = 1.0;
    }

    const KalmanNoise& noise() const noexcept { return noise_; }
    const Matrix8d& transition() const noexcept { return transition_; }
    const Matrix48d& observation() const noexcept { return observation_; }

    KalmanState initiate(const BoundingBox& box) const {
        const Vector4d z = to_measurement(box);
        KalmanState s;
        s.mean.head<4>() = z;
        s.mean.tail<4>().setZero();
        const double h = z(3);
        const double wp = noise_.std_weight_position;
        const double wv = noise_.std_weight_velocity;
        Vector8d std;
        std << 2 * wp * h, 2 * wp * h, 1e-2, 2 * wp * h, 10 * wv * h, 10 * wv * h, 1e-5, 10 * wv * h;
        s.covariance = std.array().square().matrix().asDiagonal();
        s.source_box = box;
        return s;
    }

    KalmanState predict(const KalmanState& s) const {
        KalmanState out;
        out.mean = transition_ * s.mean;
        out.covariance = transition_ * s.covariance * transition_.transpose() + process_noise(s.mean(3));
        symmetrize(out.covariance);
        out.source_box = s.source_box;
        return out;
    }

    /// Projected measurement distribution (mean, covariance incl. R).
    std::pair<Vector4d, Matrix4d> project(const KalmanState& s) const {
        Vector4d mean = observation_ * s.mean;
        Matrix4d cov = observation_ * s.covariance * observation_.transpose() + measurement_noise(s.mean(3));
        return {mean, cov};
    }

    KalmanState update(const KalmanState& s, const BoundingBox& box) const {
        const Vector4d z = to_measurement(box);
        const auto [projected_mean, projected_cov] = project(s);
        const Eigen::LDLT<Matrix4d> factor(projected_cov);
        // K = P H^T S^-1, solved as S K^T = H P.
        const Eigen::Matrix<double, 8, 4> gain =
            factor.solve(observation_ * s.covariance).transpose();
        KalmanState out;
        out.mean = s.mean + gain * (z - projected_mean);
        // Joseph form keeps the posterior symmetric positive semidefinite.
        const Matrix8d ikh = Matrix8d::Identity() - gain * observation_;
        out.covariance = ikh * s.covariance * ikh.transpose() +
                         gain * measurement_noise(s.mean(3)) * gain.transpose();
        symmetrize(out.covariance);
        out.source_box = box;
        return out;
    }

    /// Squared Mahalanobis distance of every box to the projected state.
    /// The projected covariance is regularized by 1e-9 I before factoring.
    std::vector<double> gating_distance(const KalmanState& s, std::span<const BoundingBox> boxes) const {
        auto [mean, cov] = project(s);
        cov += 1e-9 * Matrix4d::Identity();
        const Eigen::LLT<Matrix4d> chol(cov);
        if (chol.info() != Eigen::Success) {
            throw DegenerateStateError("gating_distance: projected covariance is not positive definite");
        }
        const Matrix4d lower = chol.matrixL();
        std::vector<double> out;
        out.reserve(boxes.size());
        for (const auto& box : boxes) {
            const Vector4d d = to_measurement(box) - mean;
            const Vector4d z = lower.triangularView<Eigen::Lower>().solve(d);
            out.push_back(z.squaredNorm());
        }
        return out;
    }

private:
    Matrix8d process_noise(double h) const {
        const double wp = noise_.std_weight_position * h;
        const double wv = noise_.std_weight_velocity * h;
        Vector8d std;
        std << wp, wp, 1e-2, wp, wv, wv, 1e-5, wv;
        return (noise_.process_scale * noise_.process_scale * std.array().square()).matrix().asDiagonal();
    }

    Matrix4d measurement_noise(double h) const {
        const double wp = noise_.std_weight_position * h;
        Vector4d std(wp, wp, 1e-1, wp);
        return (noise_.measurement_scale * noise_.measurement_scale * std.array().square()).matrix().asDiagonal();
    }

    static void symmetrize(Matrix8d& m) { m = (0.5 * (m + m.transpose())).eval(); }

    KalmanNoise noise_;
    Matrix8d transition_;
    Matrix48d observation_;
};

inline std::pair<double, double> predicted_center(const KalmanState& s) {
    if (!(s.mean(3) > 0.0)) throw DegenerateStateError("kalman state has non-positive height");
    return {s.mean(0), s.mean(1)};
}

/// Converts (cx, cy, a, h) back to top-left form. Inverse of initiate() for
/// the position part.
inline BoundingBox predicted_box(const KalmanState& s) {
    if (s.source_box && s.source_box->is_valid() && s.mean.head<4>() == to_measurement(*s.source_box)) {
        return *s.source_box;
    }
    const double h = s.mean(3);
    if (!(h > 0.0)) throw DegenerateStateError("kalman state has non-positive height");
    const double w = s.mean(2) * h;
    if (!(w > 0.0)) throw DegenerateStateError("kalman state has non-positive width");
    return {s.mean(0) - w / 2.0, s.mean(1) - h / 2.0, w, h};
}

}  // namespace simpletrack
