#pragma once

// Umbrella header: eigenvalue-based certificates for parameter-dependent
// Finsler LMIs, multiplier synthesis, and polytopic relaxation export.

#include "finsler/analysis.hpp"
#include "finsler/domain.hpp"
#include "finsler/extended_real.hpp"
#include "finsler/linalg.hpp"
#include "finsler/matrix.hpp"
#include "finsler/matrix_fn.hpp"
#include "finsler/pointwise.hpp"
#include "finsler/polytopic.hpp"
#include "finsler/sdpa.hpp"
#include "finsler/switching.hpp"
#include "finsler/tolerances.hpp"
