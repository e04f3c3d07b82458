#pragma once

#include "arena/geometry.hpp"
#include "arena/world.hpp"
#include "arena/pathfinder.hpp"
#include "arena/beliefs.hpp"
#include "arena/orgmodel.hpp"
#include "arena/contract_net.hpp"
#include "arena/agents.hpp"
#include "arena/config.hpp"
#include "arena/harness.hpp"
