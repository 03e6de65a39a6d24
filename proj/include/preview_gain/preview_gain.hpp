#pragma once

#include "preview_gain/common.hpp"
#include "preview_gain/csv.hpp"
#include "preview_gain/json_io.hpp"
#include "preview_gain/lifting.hpp"
#include "preview_gain/model.hpp"
#include "preview_gain/riccati.hpp"
#include "preview_gain/sim.hpp"
#include "preview_gain/spd.hpp"
#include "preview_gain/synthesis.hpp"
