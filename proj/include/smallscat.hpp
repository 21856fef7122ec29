#pragma once

#include "smallscat/errors.hpp"
#include "smallscat/quadrature.hpp"
#include "smallscat/spherical_harmonics.hpp"
#include "smallscat/geometry.hpp"
#include "smallscat/incident.hpp"
#include "smallscat/parallel.hpp"
#include "smallscat/bem.hpp"
#include "smallscat/sphere_oracle.hpp"
#include "smallscat/asymptotic.hpp"
#include "smallscat/synthesis.hpp"
#include "smallscat/metrics.hpp"
#include "smallscat/config.hpp"
#include "smallscat/experiment.hpp"
