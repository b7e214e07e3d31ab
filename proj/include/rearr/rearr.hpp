#pragma once

#include "rearr/approx.hpp"
#include "rearr/constructs.hpp"
#include "rearr/errors.hpp"
#include "rearr/expr.hpp"
#include "rearr/functional.hpp"
#include "rearr/harness.hpp"
#include "rearr/integrand.hpp"
#include "rearr/io.hpp"
#include "rearr/numeric.hpp"
#include "rearr/piecewise_linear.hpp"
#include "rearr/pl_literal.hpp"
#include "rearr/quadrature.hpp"
#include "rearr/random.hpp"
#include "rearr/rearrangement.hpp"
#include "rearr/weight.hpp"
#include "rearr/weightlab.hpp"
