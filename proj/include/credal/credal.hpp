#pragma once

// Umbrella header.

#include "credal/ascent.hpp"
#include "credal/inference.hpp"
#include "credal/lavine.hpp"
#include "credal/model_io.hpp"
#include "credal/natural_extension.hpp"
#include "credal/network.hpp"
#include "credal/polytope.hpp"
#include "credal/runner.hpp"
#include "credal/simplex.hpp"
#include "credal/transform.hpp"
