#pragma once

#include "mzchaos/legendre.hpp"
#include "mzchaos/fourier.hpp"
#include "mzchaos/chaos.hpp"
#include "mzchaos/timestep.hpp"
#include "mzchaos/stats.hpp"
#include "mzchaos/reduced.hpp"
#include "mzchaos/memory_select.hpp"
#include "mzchaos/validation.hpp"
#include "mzchaos/config.hpp"
#include "mzchaos/scenario.hpp"
