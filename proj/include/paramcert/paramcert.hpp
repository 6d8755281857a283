#pragma once

#include "paramcert/errors.hpp"
#include "paramcert/rational.hpp"
#include "paramcert/polynomial.hpp"
#include "paramcert/ratfun.hpp"
#include "paramcert/expr_parser.hpp"
#include "paramcert/upoly.hpp"
#include "paramcert/interval.hpp"
#include "paramcert/isolate.hpp"
#include "paramcert/linalg.hpp"
#include "paramcert/groebner.hpp"
#include "paramcert/model.hpp"
#include "paramcert/datafit.hpp"
#include "paramcert/prolongation.hpp"
#include "paramcert/rur.hpp"
#include "paramcert/simulate.hpp"
#include "paramcert/estimate.hpp"
