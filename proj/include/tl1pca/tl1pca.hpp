#pragma once

#include "tl1pca/baselines.hpp"
#include "tl1pca/core.hpp"
#include "tl1pca/datasets.hpp"
#include "tl1pca/deflation.hpp"
#include "tl1pca/error.hpp"
#include "tl1pca/evaluation.hpp"
#include "tl1pca/norms.hpp"
#include "tl1pca/objective.hpp"
#include "tl1pca/solver.hpp"
