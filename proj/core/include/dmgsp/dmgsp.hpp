#pragma once

#include "dmgsp/csv.hpp"
#include "dmgsp/diffusion.hpp"
#include "dmgsp/error.hpp"
#include "dmgsp/experiments.hpp"
#include "dmgsp/graph.hpp"
#include "dmgsp/gso.hpp"
#include "dmgsp/learning.hpp"
#include "dmgsp/metrics.hpp"
#include "dmgsp/rng.hpp"
#include "dmgsp/variation.hpp"
#include "dmgsp/version.hpp"
