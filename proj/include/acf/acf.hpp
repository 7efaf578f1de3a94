#pragma once

#include "acf/channels.hpp"
#include "acf/errors.hpp"
#include "acf/parallel.hpp"
#include "acf/quadrature.hpp"
#include "acf/roots.hpp"
#include "acf/sae_spectrum.hpp"
#include "acf/scattering.hpp"
#include "acf/shell_model.hpp"
#include "acf/specfun.hpp"
