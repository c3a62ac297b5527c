// Umbrella header.
#pragma once

#include "dmpm/control/adam.hpp"
#include "dmpm/control/optimize.hpp"
#include "dmpm/core/dual.hpp"
#include "dmpm/core/linalg.hpp"
#include "dmpm/grad/gradcheck.hpp"
#include "dmpm/grad/window.hpp"
#include "dmpm/integrate/boundary.hpp"
#include "dmpm/integrate/integrators.hpp"
#include "dmpm/integrate/rollout.hpp"
#include "dmpm/materials/svk.hpp"
#include "dmpm/mpm/derivative.hpp"
#include "dmpm/mpm/flip.hpp"
#include "dmpm/mpm/grid.hpp"
#include "dmpm/mpm/particles.hpp"
#include "dmpm/mpm/shape.hpp"
#include "dmpm/mpm/transfer.hpp"
#include "dmpm/mppi/mppi.hpp"
#include "dmpm/scenarios/beam.hpp"
#include "dmpm/scenarios/rope.hpp"
#include "dmpm/scenarios/seeding.hpp"
