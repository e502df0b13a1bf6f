// tvbound.hpp: umbrella header.
#pragma once

#include "tvbound/conf_bounds.hpp"
#include "tvbound/dist_core.hpp"
#include "tvbound/empirical.hpp"
#include "tvbound/errors.hpp"
#include "tvbound/experiment.hpp"
#include "tvbound/io.hpp"
#include "tvbound/minimax_lab.hpp"
#include "tvbound/oracle_bounds.hpp"
#include "tvbound/parallel.hpp"
#include "tvbound/rademacher.hpp"
#include "tvbound/sampling.hpp"
#include "tvbound/stats.hpp"
