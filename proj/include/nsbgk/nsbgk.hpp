#pragma once
/// @file nsbgk.hpp
/// @brief Umbrella header for the solver library.

#include "nsbgk/core.hpp"
#include "nsbgk/numerics.hpp"
#include "nsbgk/moments.hpp"
#include "nsbgk/maxwellian.hpp"
#include "nsbgk/transport.hpp"
#include "nsbgk/fluid.hpp"
#include "nsbgk/diagnostics.hpp"
#include "nsbgk/initial_data.hpp"
#include "nsbgk/stepper.hpp"
#include "nsbgk/io.hpp"
