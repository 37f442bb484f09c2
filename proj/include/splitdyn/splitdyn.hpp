#ifndef SPLITDYN_SPLITDYN_HPP
#define SPLITDYN_SPLITDYN_HPP

#include "diagnostics.hpp"
#include "force_law.hpp"
#include "harness/bodies.hpp"
#include "harness/config.hpp"
#include "harness/csv.hpp"
#include "harness/experiments.hpp"
#include "invariants.hpp"
#include "mass_model.hpp"
#include "newton.hpp"
#include "potentials.hpp"
#include "split_potential.hpp"
#include "step.hpp"
#include "system.hpp"
#include "types.hpp"

#endif
