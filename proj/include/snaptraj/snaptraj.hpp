#ifndef SNAPTRAJ_SNAPTRAJ_HPP
#define SNAPTRAJ_SNAPTRAJ_HPP

#include "snaptraj/basis.hpp"
#include "snaptraj/bench.hpp"
#include "snaptraj/oracle.hpp"
#include "snaptraj/solver.hpp"
#include "snaptraj/spline.hpp"
#include "snaptraj/trajectory_table.hpp"
#include "snaptraj/types.hpp"
#include "snaptraj/waypoints.hpp"

#endif
