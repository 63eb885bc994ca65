#pragma once

#include "sweepsim/analytic.hpp"
#include "sweepsim/config.hpp"
#include "sweepsim/engine.hpp"
#include "sweepsim/experiment.hpp"
#include "sweepsim/genealogy.hpp"
#include "sweepsim/harness.hpp"
#include "sweepsim/model.hpp"
#include "sweepsim/oracles.hpp"
#include "sweepsim/rng.hpp"
