#pragma once

// Umbrella header for the component-based runtime-assurance library.

#include "cbsa/compose.hpp"
#include "cbsa/component.hpp"
#include "cbsa/contract.hpp"
#include "cbsa/discharge.hpp"
#include "cbsa/errors.hpp"
#include "cbsa/exec.hpp"
#include "cbsa/geometry.hpp"
#include "cbsa/grid_map.hpp"
#include "cbsa/harness.hpp"
#include "cbsa/mission_es.hpp"
#include "cbsa/navigation.hpp"
#include "cbsa/planner.hpp"
#include "cbsa/plant.hpp"
#include "cbsa/scenario.hpp"
#include "cbsa/simplex.hpp"
#include "cbsa/store.hpp"
#include "cbsa/system.hpp"
#include "cbsa/trace_io.hpp"
#include "cbsa/value.hpp"
