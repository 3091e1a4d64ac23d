#pragma once
// Umbrella header.

#include "tailbound/bounds.hpp"
#include "tailbound/harness.hpp"
#include "tailbound/point_set.hpp"
#include "tailbound/projection.hpp"
#include "tailbound/rangespace.hpp"
#include "tailbound/rng.hpp"
