#pragma once

#include "zloss/error.hpp"
#include "zloss/stats.hpp"
#include "zloss/roots.hpp"
#include "zloss/optimize.hpp"
#include "zloss/kernels.hpp"
#include "zloss/cutoff.hpp"
#include "zloss/matrix.hpp"
#include "zloss/rng.hpp"
#include "zloss/synth.hpp"
#include "zloss/model.hpp"
#include "zloss/train.hpp"
#include "zloss/detect.hpp"
#include "zloss/sweep.hpp"
#include "zloss/csv.hpp"
#include "zloss/version.hpp"
