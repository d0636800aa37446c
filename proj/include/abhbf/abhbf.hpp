// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#pragma once

#include "abhbf/array.hpp"
#include "abhbf/baselines.hpp"
#include "abhbf/beam_split.hpp"
#include "abhbf/channel.hpp"
#include "abhbf/config_json.hpp"
#include "abhbf/experiment.hpp"
#include "abhbf/hybrid.hpp"
#include "abhbf/precoding.hpp"
#include "abhbf/rate.hpp"
#include "abhbf/rng.hpp"
#include "abhbf/scenario.hpp"
#include "abhbf/version.hpp"
#include "abhbf/waterfill.hpp"
