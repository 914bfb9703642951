// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "simpletrack/geometry.hpp"

namespace simpletrack {

struct AssignmentResult {
    struct Match {
        std::int64_t row_id;
        std::int64_t col_id;
        double cost;

        friend bool operator==(const Match&, const Match&) = default;
    };

    std::vector<Match> matches;              // ordered by row index
    std::vector<std::int64_t> unmatched_rows;  // ascending row index
    std::vector<std::int64_t> unmatched_cols;  // ascending column index

    double total_cost() const noexcept {
        double sum = 0.0;
        for (const auto& m : matches) sum += m.cost;
        return sum;
    }

    friend bool operator==(const AssignmentResult&, const AssignmentResult&) = default;
};

namespace detail {

// Row index matched to each column of a square cost matrix (row-major, n x n),
// minimizing the total. Shortest augmenting path Hungarian method, O(n^3).
// Ties resolve towards the lowest index because every scan is strict `<` in
// ascending order.
inline std::vector<std::size_t> hungarian_square(const std::vector<double>& a, std::size_t n) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_of_col(n);
    for (std::size_t j = 1; j <= n; ++j) row_of_col[j - 1] = p[j] - 1;
    return row_of_col;
}

}  // namespace detail

/// Minimum-cost assignment between rows and columns of `cost`.
///
/// Entries above `threshold` or INFEASIBLE are removed before solving. The
/// matrix is padded to a square with dummy cells whose cost exceeds the sum of
/// any set of admissible entries, so the solver first maximizes the number of
/// admissible matches and then minimizes their total cost. Dummy and gated
/// cells chosen by the solver are reported as unmatched.
inline AssignmentResult solve(const CostMatrix& cost, double threshold) {
    if (!(threshold >= 0.0)) throw std::invalid_argument("assignment threshold must be non-negative");

    AssignmentResult result;
    const std::size_t rows = cost.rows();
    const std::size_t cols = cost.cols();
    auto admissible = [&](std::size_t r, std::size_t c) {
        const double v = cost(r, c);
        return v != CostMatrix::kInfeasible && v <= threshold;
    };

    std::vector<std::int64_t> row_match(rows, -1);
    double max_admissible = 0.0;
    bool any_admissible = false;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (admissible(r, c)) {
                any_admissible = true;
                max_admissible = std::max(max_admissible, cost(r, c));
            }
        }
    }

    if (any_admissible) {
        const std::size_t n = std::max(rows, cols);
        const double blocked = static_cast<double>(n) * max_admissible + 1.0;
        std::vector<double> square(n * n, blocked);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                if (admissible(r, c)) square[r * n + c] = cost(r, c);
            }
        }
        const auto row_of_col = detail::hungarian_square(square, n);
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t r = row_of_col[c];
            if (r < rows && admissible(r, c)) row_match[r] = static_cast<std::int64_t>(c);
        }
    }

    std::vector<char> col_used(cols, 0);
    for (std::size_t r = 0; r < rows; ++r) {
        if (row_match[r] >= 0) {
            const auto c = static_cast<std::size_t>(row_match[r]);
            col_used[c] = 1;
            result.matches.push_back({cost.row_ids()[r], cost.col_ids()[c], cost(r, c)});
        } else {
            result.unmatched_rows.push_back(cost.row_ids()[r]);
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (!col_used[c]) result.unmatched_cols.push_back(cost.col_ids()[c]);
    }
    return result;
}

}  // namespace simpletrack
