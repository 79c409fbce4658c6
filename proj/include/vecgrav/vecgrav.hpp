#pragma once

// Everything in one include.

#include "vecgrav/config.hpp"
#include "vecgrav/convergence.hpp"
#include "vecgrav/energy_momentum.hpp"
#include "vecgrav/errors.hpp"
#include "vecgrav/field_kinematics.hpp"
#include "vecgrav/force_laws.hpp"
#include "vecgrav/grid.hpp"
#include "vecgrav/identity_suite.hpp"
#include "vecgrav/io.hpp"
#include "vecgrav/operators.hpp"
#include "vecgrav/parallel.hpp"
#include "vecgrav/pipeline.hpp"
#include "vecgrav/potential_solvers.hpp"
#include "vecgrav/report.hpp"
#include "vecgrav/runner.hpp"
#include "vecgrav/sources.hpp"
#include "vecgrav/units.hpp"
#include "vecgrav/waves.hpp"
