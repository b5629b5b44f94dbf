// Copyright 2026 The nbtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Everything except json_io.hpp and acceptance.hpp, which need the vendored
// JSON header.

#include "nbtree/bounds.hpp"
#include "nbtree/correlation.hpp"
#include "nbtree/error.hpp"
#include "nbtree/labels.hpp"
#include "nbtree/nb_operator.hpp"
#include "nbtree/parallel.hpp"
#include "nbtree/philox.hpp"
#include "nbtree/rooted_layout.hpp"
#include "nbtree/rules.hpp"
#include "nbtree/sweep.hpp"
#include "nbtree/tree_ball.hpp"
#include "nbtree/universal.hpp"
