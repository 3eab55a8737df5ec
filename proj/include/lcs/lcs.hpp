#pragma once

#include "lcs/errors.hpp"
#include "lcs/specfun.hpp"
#include "lcs/spectrum.hpp"
#include "lcs/fockspace.hpp"
#include "lcs/states.hpp"
#include "lcs/quadrature.hpp"
#include "lcs/identity.hpp"
#include "lcs/dynamics.hpp"
