#pragma once

#include "idim/angle_model.hpp"
#include "idim/bench.hpp"
#include "idim/calibration.hpp"
#include "idim/data_matrix.hpp"
#include "idim/datasets.hpp"
#include "idim/errors.hpp"
#include "idim/estimators.hpp"
#include "idim/neighbors.hpp"
#include "idim/norm_model.hpp"
#include "idim/rng.hpp"
#include "idim/special_functions.hpp"

namespace idim {

/// Caps the worker threads used by the parallel loops (0 = all hardware
/// threads). Results do not depend on the setting.
inline void set_max_threads(unsigned n) { detail::set_max_threads(n); }

}  // namespace idim
