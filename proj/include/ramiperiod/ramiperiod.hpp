#pragma once

#include "config.hpp"
#include "error.hpp"
#include "covering.hpp"
#include "sphere.hpp"
#include "mesh.hpp"
#include "meshgen.hpp"
#include "quadrature.hpp"
#include "weights.hpp"
#include "homology.hpp"
#include "harmonic.hpp"
#include "periods.hpp"
#include "harness.hpp"
