#pragma once

#include "common.hpp"
#include "quadrature.hpp"
#include "trace.hpp"
#include "geometry.hpp"
#include "lbfgs.hpp"
#include "renorm.hpp"
#include "critpoints.hpp"
#include "boundarymin.hpp"
#include "field2d.hpp"
#include "corelocal.hpp"
#include "dimred.hpp"
