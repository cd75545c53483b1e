#pragma once

#include "bhdimer/version.hpp"
#include "bhdimer/types.hpp"
#include "bhdimer/core.hpp"
#include "bhdimer/integrator.hpp"
#include "bhdimer/dynamics.hpp"
#include "bhdimer/fixed_points.hpp"
#include "bhdimer/coherent.hpp"
#include "bhdimer/manybody.hpp"
#include "bhdimer/lindblad.hpp"
