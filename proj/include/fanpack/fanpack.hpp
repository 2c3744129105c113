#pragma once
// Everything in one include.

#include "fanpack/adversary.hpp"
#include "fanpack/errors.hpp"
#include "fanpack/geometry.hpp"
#include "fanpack/harness.hpp"
#include "fanpack/json_io.hpp"
#include "fanpack/offline.hpp"
#include "fanpack/rat.hpp"
#include "fanpack/reduce.hpp"
#include "fanpack/sorting.hpp"
#include "fanpack/strip.hpp"
#include "fanpack/svg.hpp"
