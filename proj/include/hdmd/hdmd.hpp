#pragma once

// Hankel dynamic mode decomposition nowcasting toolkit.

#include "hdmd/bayesian.hpp"
#include "hdmd/dmd.hpp"
#include "hdmd/error.hpp"
#include "hdmd/hankel.hpp"
#include "hdmd/harness.hpp"
#include "hdmd/io.hpp"
#include "hdmd/metrics.hpp"
#include "hdmd/nowcast.hpp"
#include "hdmd/parallel.hpp"
#include "hdmd/preprocess.hpp"
#include "hdmd/random.hpp"
#include "hdmd/seaway.hpp"
#include "hdmd/stats.hpp"
#include "hdmd/types.hpp"
