// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 simpletrack contributors

#pragma once

#include "simpletrack/assignment.hpp"
#include "simpletrack/bench.hpp"
#include "simpletrack/error.hpp"
#include "simpletrack/geometry.hpp"
#include "simpletrack/kalman.hpp"
#include "simpletrack/logging.hpp"
#include "simpletrack/metrics.hpp"
#include "simpletrack/mot_io.hpp"
#include "simpletrack/synth.hpp"
#include "simpletrack/tracker.hpp"

namespace simpletrack {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace simpletrack
