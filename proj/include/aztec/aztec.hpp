#pragma once

// Everything at once.

#include "numerics.hpp"
#include "weights.hpp"
#include "graphs.hpp"
#include "kasteleyn.hpp"
#include "transitions.hpp"
#include "dynamics.hpp"
#include "factorization.hpp"
#include "periodic.hpp"
#include "boundary_inverse.hpp"
#include "io.hpp"
#include "verify.hpp"
