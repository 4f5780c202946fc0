// mrc.hpp - umbrella header.
#pragma once

#include "mrc/dataset.hpp"
#include "mrc/error.hpp"
#include "mrc/eval.hpp"
#include "mrc/feature_map.hpp"
#include "mrc/io.hpp"
#include "mrc/learn.hpp"
#include "mrc/lp.hpp"
#include "mrc/matrix.hpp"
#include "mrc/predict.hpp"
#include "mrc/rng.hpp"
