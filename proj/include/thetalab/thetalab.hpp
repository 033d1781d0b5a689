#pragma once

// Convenience header pulling in the whole library.

#include "error.hpp"
#include "version.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "grid.hpp"
#include "skewform.hpp"
#include "specfun.hpp"
#include "kernel.hpp"
#include "twistcal.hpp"
#include "gridop.hpp"
#include "calculus.hpp"
#include "horm.hpp"
#include "schur.hpp"
#include "moyal.hpp"
#include "io.hpp"
#include "verify.hpp"
