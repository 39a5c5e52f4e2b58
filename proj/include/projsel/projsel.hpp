#pragma once

#include "projsel/analytic.hpp"
#include "projsel/core.hpp"
#include "projsel/dynamics.hpp"
#include "projsel/ic_audit.hpp"
#include "projsel/mechanism_eval.hpp"
#include "projsel/monte_carlo.hpp"
#include "projsel/numeric.hpp"
#include "projsel/random.hpp"
#include "projsel/regimes.hpp"
#include "projsel/search.hpp"
#include "projsel/serialization.hpp"
