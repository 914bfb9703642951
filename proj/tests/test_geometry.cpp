// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "simpletrack/geometry.hpp"

namespace st = simpletrack;
using st::BoundingBox;
using st::CostMatrix;
using st::Embedding;

namespace {

constexpr double kTol = 1e-9;

struct CaptureLog {
    CaptureLog() {
        st::set_log_sink([this](std::string_view m) { lines.emplace_back(m); });
    }
    ~CaptureLog() { st::set_log_sink(nullptr); }
    std::vector<std::string> lines;
};

}  // namespace

TEST(Iou, HandExamples) {
    EXPECT_EQ(st::iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
    EXPECT_EQ(st::iou({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
    EXPECT_DOUBLE_EQ(st::iou({0, 0, 10, 10}, {5, 0, 10, 10}), 1.0 / 3.0);
}

TEST(Iou, RejectsInvalidBoxes) {
    EXPECT_THROW(st::iou({0, 0, 0, 10}, {0, 0, 10, 10}), st::InvalidBoxError);
    EXPECT_THROW(st::iou({0, 0, 10, 10}, {0, 0, 10, -1}), st::InvalidBoxError);
    EXPECT_THROW(st::giou_distance({0, 0, NAN, 10}, {0, 0, 10, 10}), st::InvalidBoxError);
    EXPECT_THROW(st::giou_distance({INFINITY, 0, 1, 1}, {0, 0, 10, 10}), st::InvalidBoxError);
}

TEST(Giou, HandExamples) {
    EXPECT_EQ(st::giou_distance({0, 0, 10, 10}, {0, 0, 10, 10}), 0.0);
    EXPECT_EQ(st::giou_distance({0, 0, 1, 1}, {2, 2, 1, 1}), 16.0 / 9.0);
}

TEST(Giou, MatchesPixelGridIntegration) {
    st::Random rng(101);
    for (int k = 0; k < 2000; ++k) {
        const auto a = st::testing::random_pixel_box(rng);
        const auto b = st::testing::random_pixel_box(rng);
        EXPECT_NEAR(st::iou(a, b), st::testing::pixel_iou(a, b), 1e-12) << a << " " << b;
        EXPECT_NEAR(st::giou_distance(a, b), st::testing::pixel_giou_distance(a, b), 1e-12) << a << " " << b;
    }
}

TEST(Giou, Invariants) {
    st::Random rng(7);
    for (int k = 0; k < 10000; ++k) {
        const auto a = st::testing::random_box(rng);
        const auto b = rng.uniform() < 0.3 ? BoundingBox{a.x + rng.uniform(-5, 5), a.y, a.w, a.h} : st::testing::random_box(rng);
        const double i = st::iou(a, b);
        const double g = st::giou_distance(a, b);
        ASSERT_GE(i, 0.0);
        ASSERT_LE(i, 1.0);
        ASSERT_GE(g, 0.0);
        ASSERT_LT(g, 2.0);
        ASSERT_EQ(i, st::iou(b, a));
        ASSERT_EQ(g, st::giou_distance(b, a));

        const double dx = rng.uniform(-500, 500), dy = rng.uniform(-500, 500);
        const BoundingBox ta{a.x + dx, a.y + dy, a.w, a.h}, tb{b.x + dx, b.y + dy, b.w, b.h};
        ASSERT_NEAR(st::iou(ta, tb), i, kTol);
        ASSERT_NEAR(st::giou_distance(ta, tb), g, kTol);

        const double s = rng.uniform(0.1, 10.0);
        const BoundingBox sa{a.x * s, a.y * s, a.w * s, a.h * s}, sb{b.x * s, b.y * s, b.w * s, b.h * s};
        ASSERT_NEAR(st::iou(sa, sb), i, kTol);
        ASSERT_NEAR(st::giou_distance(sa, sb), g, kTol);

        ASSERT_EQ(st::giou_distance(a, a), 0.0);
        ASSERT_EQ(g == 0.0, a.x == b.x && a.y == b.y && a.w == b.w && a.h == b.h);
    }
}

TEST(Giou, DisjointBoxesStayBelowTwo) {
    const double g = st::giou_distance({0, 0, 1, 1}, {1e6, 1e6, 1, 1});
    EXPECT_LT(g, 2.0);
    EXPECT_GT(g, 1.999);
}

TEST(Cosine, HandExamples) {
    EXPECT_EQ(st::cosine_distance(Embedding{1, 0, 0}, Embedding{1, 0, 0}), 0.0);
    EXPECT_EQ(st::cosine_distance(Embedding{1, 0}, Embedding{0, 1}), 1.0);
    EXPECT_EQ(st::cosine_distance(Embedding{1, 0}, Embedding{-1, 0}), 2.0);
}

TEST(Cosine, Errors) {
    EXPECT_THROW(st::cosine_distance(Embedding{0, 0}, Embedding{1, 0}), st::DegenerateEmbeddingError);
    EXPECT_THROW(st::cosine_distance(Embedding{1, 0}, Embedding{1, 0, 0}), st::DimensionMismatchError);
    EXPECT_THROW(st::cosine_distance(Embedding{NAN, 1}, Embedding{1, 0}), st::DegenerateEmbeddingError);
}

TEST(Cosine, Invariants) {
    st::Random rng(3);
    for (int k = 0; k < 5000; ++k) {
        const std::size_t dim = 1 + rng.bits() % 32;
        const auto a = st::testing::random_embedding(rng, dim);
        const auto b = st::testing::random_embedding(rng, dim);
        const double d = st::cosine_distance(a, b);
        ASSERT_GE(d, -kTol);
        ASSERT_LE(d, 2.0 + kTol);
        ASSERT_EQ(d, st::cosine_distance(b, a));
        ASSERT_NEAR(d, st::testing::naive_cosine_distance(a, b), kTol);
        std::vector<double> scaled(a.values().begin(), a.values().end());
        const double s = rng.uniform(1e-3, 1e3);
        for (auto& v : scaled) v *= s;
        ASSERT_NEAR(st::cosine_distance(Embedding(scaled), b), d, kTol);
    }
}

TEST(CostMatrices, SingleIdenticalPair) {
    const std::vector<BoundingBox> boxes{{3, 4, 10, 20}};
    const std::vector<Embedding> embs{Embedding{0.6, 0.8}};
    EXPECT_EQ(st::iou_cost_matrix(boxes, boxes)(0, 0), 0.0);
    EXPECT_EQ(st::giou_cost_matrix(boxes, boxes)(0, 0), 0.0);
    EXPECT_EQ(st::embedding_cost_matrix(embs, embs)(0, 0), 0.0);
    EXPECT_EQ(st::eg_cost_matrix(boxes, embs, boxes, embs)(0, 0), 0.0);
}

TEST(CostMatrices, EmptyDetections) {
    const std::vector<BoundingBox> boxes{{0, 0, 1, 1}, {2, 2, 3, 3}};
    const std::vector<Embedding> embs{Embedding{1, 0}, Embedding{0, 1}};
    const auto m = st::eg_cost_matrix(boxes, embs, {}, {});
    EXPECT_EQ(m.rows(), 2u);
    EXPECT_EQ(m.cols(), 0u);
    EXPECT_EQ(st::iou_cost_matrix(boxes, {}).cols(), 0u);
    EXPECT_EQ(st::giou_cost_matrix({}, boxes).rows(), 0u);
    EXPECT_EQ(st::embedding_cost_matrix(embs, {}).cols(), 0u);
}

TEST(CostMatrices, AgreeWithScalarOps) {
    st::Random rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<BoundingBox> tb, db;
        std::vector<Embedding> te, de;
        for (int i = 0; i < 5; ++i) {
            tb.push_back(st::testing::random_box(rng, 40.0));
            te.push_back(st::testing::random_embedding(rng, 16));
            db.push_back(st::testing::random_box(rng, 40.0));
            de.push_back(st::testing::random_embedding(rng, 16));
        }
        const auto mi = st::iou_cost_matrix(tb, db);
        const auto mg = st::giou_cost_matrix(tb, db);
        const auto me = st::embedding_cost_matrix(te, de);
        const auto eg = st::eg_cost_matrix(tb, te, db, de, {1.0, 0.5});
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                EXPECT_EQ(mi(i, j), 1.0 - st::iou(tb[i], db[j]));
                EXPECT_EQ(mg(i, j), st::giou_distance(tb[i], db[j]));
                EXPECT_NEAR(me(i, j), st::testing::naive_cosine_distance(te[i], de[j]), kTol);
                EXPECT_NEAR(eg(i, j), 1.0 * me(i, j) + 0.5 * mg(i, j), kTol);
                EXPECT_GE(eg(i, j), 0.0);
                EXPECT_LE(eg(i, j), 3.0);
            }
        }
        EXPECT_TRUE(eg.is_well_formed());
    }
}

TEST(CostMatrices, EgWeightsAreLinear) {
    st::Random rng(12);
    std::vector<st::Observation> tracks, dets;
    for (int i = 0; i < 4; ++i) {
        tracks.push_back({st::testing::random_box(rng, 30.0), st::testing::random_embedding(rng, 8)});
        dets.push_back({st::testing::random_box(rng, 30.0), st::testing::random_embedding(rng, 8)});
    }
    const auto base = st::eg_cost_matrix(tracks, dets, {0.7, 0.3});
    const auto doubled = st::eg_cost_matrix(tracks, dets, {1.4, 0.6});
    const auto appearance_off = st::eg_cost_matrix(tracks, dets, {0.0, 0.5});
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_EQ(doubled(i, j), 2.0 * base(i, j));
            EXPECT_EQ(appearance_off(i, j), 0.5 * st::giou_distance(tracks[i].box, dets[j].box));
        }
    }
    EXPECT_THROW(st::eg_cost_matrix(tracks, dets, {-1.0, 0.5}), std::invalid_argument);
}

TEST(CostMatrices, BadEntriesBecomeInfeasibleWithOneWarning) {
    CaptureLog log;
    const std::vector<BoundingBox> boxes{{0, 0, 10, 10}, {0, 0, 10, 10}};
    const std::vector<Embedding> tracks{Embedding{1, 0}, Embedding{0, 0}};
    const std::vector<Embedding> dets{Embedding{1, 0}, Embedding{0, 0}};
    const auto m = st::eg_cost_matrix(boxes, tracks, boxes, dets);
    EXPECT_TRUE(m.is_feasible(0, 0));
    EXPECT_FALSE(m.is_feasible(0, 1));
    EXPECT_FALSE(m.is_feasible(1, 0));
    EXPECT_FALSE(m.is_feasible(1, 1));
    EXPECT_EQ(log.lines.size(), 1u);
    EXPECT_NE(log.lines[0].find("3 entries"), std::string::npos);
}

TEST(CostMatrices, SerializesInfeasibleAsInf) {
    CostMatrix m(1, 2);
    m(0, 0) = 0.25;
    m(0, 1) = CostMatrix::kInfeasible;
    std::ostringstream os;
    os << m;
    EXPECT_NE(os.str().find("inf"), std::string::npos);
    EXPECT_NE(os.str().find("0.25"), std::string::npos);
}

TEST(EmFusion, Chi2GateMatchesNumericQuantile) {
    EXPECT_NEAR(st::testing::chi2_quantile_4dof(0.95), st::kChi2Gate4Dof, 1e-4);
}

TEST(EmFusion, UnitWeightEqualsAppearance) {
    CostMatrix emb(2, 2), motion(2, 2);
    emb(0, 0) = 0.1, emb(0, 1) = 0.7, emb(1, 0) = 0.3, emb(1, 1) = 1.9;
    motion(0, 0) = 0.0, motion(0, 1) = 2.0, motion(1, 0) = 9.0, motion(1, 1) = 5.0;
    const auto fused = st::em_fused_cost_matrix(emb, motion, st::kChi2Gate4Dof, 1.0);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(fused(i, j), emb(i, j));
}

TEST(EmFusion, GateAndMixedComposition) {
    CostMatrix emb(2, 2), motion(2, 2);
    emb(0, 0) = 0.2, emb(0, 1) = 0.4, emb(1, 0) = 0.6, emb(1, 1) = 0.0;
    motion(0, 0) = 1.0, motion(0, 1) = 9.4877, motion(1, 0) = 9.5, motion(1, 1) = 4.0;
    const double g = st::kChi2Gate4Dof;
    const auto fused = st::em_fused_cost_matrix(emb, motion, g, 0.98);
    EXPECT_NEAR(fused(0, 0), 0.98 * 0.2 + 0.02 * (1.0 / g), kTol);
    EXPECT_NEAR(fused(0, 1), 0.98 * 0.4 + 0.02 * 1.0, kTol);
    EXPECT_FALSE(fused.is_feasible(1, 0));
    EXPECT_NEAR(fused(1, 1), 0.02 * (4.0 / g), kTol);
}

TEST(EmFusion, ShapeMismatch) {
    EXPECT_THROW(st::em_fused_cost_matrix(CostMatrix(2, 3), CostMatrix(3, 2)), st::DimensionMismatchError);
}

TEST(BoundingBox, CornerAndCenterForms) {
    const auto b = BoundingBox::from_center(5, 10, 10, 20);
    EXPECT_EQ(b, (BoundingBox{0, 0, 10, 20}));
    EXPECT_EQ(b.right(), 10.0);
    EXPECT_EQ(b.bottom(), 20.0);
    EXPECT_EQ(b.center_x(), 5.0);
    EXPECT_EQ(b.center_y(), 10.0);
}
