#pragma once

#include "polyreach/error.hpp"
#include "polyreach/harness.hpp"
#include "polyreach/io.hpp"
#include "polyreach/neighbor_index.hpp"
#include "polyreach/point_cloud.hpp"
#include "polyreach/polyfit.hpp"
#include "polyreach/reach.hpp"
#include "polyreach/region.hpp"
#include "polyreach/rng.hpp"
#include "polyreach/volume.hpp"
