#pragma once

// Umbrella header for the whole library.

#include "geoagent/agent.hpp"
#include "geoagent/errors.hpp"
#include "geoagent/geometry.hpp"
#include "geoagent/map_render.hpp"
#include "geoagent/ops.hpp"
#include "geoagent/overlay.hpp"
#include "geoagent/providers.hpp"
#include "geoagent/raster.hpp"
#include "geoagent/raster_ops.hpp"
#include "geoagent/replay.hpp"
#include "geoagent/tools.hpp"
#include "geoagent/vector_io.hpp"
