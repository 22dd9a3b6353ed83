#pragma once

#include "fhsim/controller.hpp"
#include "fhsim/core.hpp"
#include "fhsim/csv.hpp"
#include "fhsim/frame_grid.hpp"
#include "fhsim/fronthaul.hpp"
#include "fhsim/phy.hpp"
#include "fhsim/scenario_io.hpp"
#include "fhsim/sim.hpp"
#include "fhsim/validate.hpp"
