// Copyright (c) 2026 hdg-helmholtz contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hdg/analytic.hpp"
#include "hdg/basis.hpp"
#include "hdg/bessel.hpp"
#include "hdg/diagnostics.hpp"
#include "hdg/element_space.hpp"
#include "hdg/local.hpp"
#include "hdg/mesh.hpp"
#include "hdg/pipeline.hpp"
#include "hdg/quadrature.hpp"
#include "hdg/skeleton.hpp"
#include "hdg/verify.hpp"

#ifndef HDG_VERSION
#define HDG_VERSION "0.1.0"
#endif
