// Umbrella header for the drift library.

#pragma once

#include "drift/certificate.hpp"
#include "drift/chart.hpp"
#include "drift/cones.hpp"
#include "drift/homoclinic.hpp"
#include "drift/interval.hpp"
#include "drift/linalg.hpp"
#include "drift/maps.hpp"
#include "drift/newton.hpp"
#include "drift/parameterization.hpp"
#include "drift/pipeline.hpp"
#include "drift/strips.hpp"
