#pragma once

// Umbrella header for the ScreenMin library: two-stage screen-then-test
// procedures for union hypotheses, their exact error/power calculators,
// threshold solvers, and a reproducible Monte Carlo study harness.

#include "distributions.hpp"
#include "screening.hpp"
#include "error_power.hpp"
#include "thresholds.hpp"
#include "procedures.hpp"
#include "rng.hpp"
#include "simulate.hpp"
#include "csv_io.hpp"
