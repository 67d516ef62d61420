#pragma once

/* Umbrella header for the whole library. */

#include "cmat.hpp"
#include "rng.hpp"
#include "matfact.hpp"
#include "channel.hpp"
#include "triangulate.hpp"
#include "rates.hpp"
#include "powalloc.hpp"
#include "latticelab.hpp"
#include "harness.hpp"
