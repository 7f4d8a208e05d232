// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#pragma once

#include "fasisac/ao.hpp"
#include "fasisac/baselines.hpp"
#include "fasisac/config.hpp"
#include "fasisac/model.hpp"
#include "fasisac/position_opt.hpp"
#include "fasisac/precoder_opt.hpp"
#include "fasisac/qcqp.hpp"
#include "fasisac/scenario_gen.hpp"
#include "fasisac/sweep.hpp"
#include "fasisac/types.hpp"
