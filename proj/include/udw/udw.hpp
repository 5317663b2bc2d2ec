#pragma once

#include "localization.hpp"
#include "parallel.hpp"
#include "physkit.hpp"
#include "quadrature.hpp"
#include "rates.hpp"
#include "specfun.hpp"
#include "states.hpp"
#include "templates.hpp"
