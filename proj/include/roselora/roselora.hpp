#pragma once

#include "roselora/adapter.hpp"
#include "roselora/autograd.hpp"
#include "roselora/checkpoint.hpp"
#include "roselora/config.hpp"
#include "roselora/csv.hpp"
#include "roselora/experiments.hpp"
#include "roselora/matrix.hpp"
#include "roselora/mlp.hpp"
#include "roselora/pruner.hpp"
#include "roselora/rng.hpp"
#include "roselora/sensitivity.hpp"
#include "roselora/sparsity_analysis.hpp"
#include "roselora/tasks.hpp"
#include "roselora/trainer.hpp"
