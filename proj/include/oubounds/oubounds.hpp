#pragma once

// Umbrella header: lower and upper bounds on the minimum achievable expected
// distortion for dense sensor networks observing an Ornstein-Uhlenbeck
// process under a sum power constraint.

#include "oubounds/achievable.hpp"
#include "oubounds/capacity.hpp"
#include "oubounds/ou_process.hpp"
#include "oubounds/quadrature.hpp"
#include "oubounds/sampling.hpp"
#include "oubounds/sweep.hpp"
#include "oubounds/waterfill.hpp"
