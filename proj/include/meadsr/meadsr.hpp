#pragma once

#include "meadsr/core/random.hpp"
#include "meadsr/core/scheduler.hpp"
#include "meadsr/core/types.hpp"
#include "meadsr/energy/energy.hpp"
#include "meadsr/metrics/metrics.hpp"
#include "meadsr/metrics/trace.hpp"
#include "meadsr/protocol/agent.hpp"
#include "meadsr/protocol/dsr.hpp"
#include "meadsr/protocol/mea_dsr.hpp"
#include "meadsr/protocol/packets.hpp"
#include "meadsr/protocol/route_cache.hpp"
#include "meadsr/protocol/selection.hpp"
#include "meadsr/protocol/tables.hpp"
#include "meadsr/scenario/plot.hpp"
#include "meadsr/scenario/runner.hpp"
#include "meadsr/scenario/scenario.hpp"
#include "meadsr/scenario/simulation.hpp"
#include "meadsr/scenario/suite.hpp"
#include "meadsr/traffic/cbr.hpp"
#include "meadsr/world/link_layer.hpp"
#include "meadsr/world/mobility.hpp"
