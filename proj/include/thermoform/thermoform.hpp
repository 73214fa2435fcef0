#pragma once

// Umbrella header: transfer-operator thermodynamics for smooth expanding
// circle maps — pressure, equilibrium states, linear response, CLT
// variances, large-deviations rate functions, and multifractal spectra.

#include "thermoform/circle_map.hpp"
#include "thermoform/csv.hpp"
#include "thermoform/errors.hpp"
#include "thermoform/grid.hpp"
#include "thermoform/ldp.hpp"
#include "thermoform/periodic_orbits.hpp"
#include "thermoform/potential.hpp"
#include "thermoform/response.hpp"
#include "thermoform/rng.hpp"
#include "thermoform/sampler.hpp"
#include "thermoform/spectral.hpp"
#include "thermoform/stats.hpp"
#include "thermoform/thermo.hpp"
#include "thermoform/transfer.hpp"
