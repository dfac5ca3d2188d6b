#pragma once

#include "wit/costing.hpp"
#include "wit/coverage.hpp"
#include "wit/experiment.hpp"
#include "wit/model.hpp"
#include "wit/oracle.hpp"
#include "wit/rng.hpp"
#include "wit/search.hpp"
#include "wit/validate.hpp"
#include "wit/workload_io.hpp"
