// Umbrella header.
#pragma once

#include "gpmetric/grid.hpp"
#include "gpmetric/tensor_calculus.hpp"
#include "gpmetric/krylov.hpp"
#include "gpmetric/operators.hpp"
#include "gpmetric/geodesic.hpp"
#include "gpmetric/exp_log.hpp"
#include "gpmetric/scaling.hpp"
#include "gpmetric/ricci_gradient.hpp"
#include "gpmetric/io.hpp"
#include "gpmetric/verification.hpp"
#include "gpmetric/examples.hpp"
