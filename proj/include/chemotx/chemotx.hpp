// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "chemotx/channel.hpp"
#include "chemotx/config.hpp"
#include "chemotx/detection.hpp"
#include "chemotx/errors.hpp"
#include "chemotx/mobility.hpp"
#include "chemotx/montecarlo.hpp"
#include "chemotx/physics.hpp"
#include "chemotx/random.hpp"
#include "chemotx/statistics.hpp"
#include "chemotx/table.hpp"
