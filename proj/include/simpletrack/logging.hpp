// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string_view>
#include <utility>

namespace simpletrack {

using LogSink = std::function<void(std::string_view)>;

namespace detail {

struct LogState {
    std::mutex mutex;
    LogSink sink;
};

inline LogState& log_state() {
    static LogState state;
    return state;
}

}  // namespace detail

/// Replaces the warning sink. An empty sink restores the stderr default.
inline void set_log_sink(LogSink sink) {
    auto& state = detail::log_state();
    std::lock_guard lock(state.mutex);
    state.sink = std::move(sink);
}

inline void log_warning(std::string_view message) {
    auto& state = detail::log_state();
    std::lock_guard lock(state.mutex);
    if (state.sink) {
        state.sink(message);
    } else {
        std::cerr << "[simpletrack] warning: " << message << '\n';
    }
}

}  // namespace simpletrack
