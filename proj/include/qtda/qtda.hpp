/**
 * Umbrella header: persistent-homology engines, matrix-level quantum
 * emulation, gap probes, and the resource model.
 */

#ifndef QTDA_QTDA_HPP
#define QTDA_QTDA_HPP

#include "errors.hpp"
#include "fixed_point.hpp"
#include "point_cloud.hpp"
#include "complex.hpp"
#include "jl.hpp"
#include "field.hpp"
#include "matrix.hpp"
#include "boundary.hpp"
#include "betti.hpp"
#include "chebyshev.hpp"
#include "projectors.hpp"
#include "gaps.hpp"
#include "sampling.hpp"
#include "resource.hpp"

#endif  // QTDA_QTDA_HPP
