#pragma once

// Umbrella header for the annplan library.

#include "annplan/bench.hpp"
#include "annplan/corpus.hpp"
#include "annplan/engines.hpp"
#include "annplan/error.hpp"
#include "annplan/exact.hpp"
#include "annplan/gbm.hpp"
#include "annplan/graph_index.hpp"
#include "annplan/index.hpp"
#include "annplan/io.hpp"
#include "annplan/matrix.hpp"
#include "annplan/mlp.hpp"
#include "annplan/model_selection.hpp"
#include "annplan/planner.hpp"
#include "annplan/predicate.hpp"
#include "annplan/predicate_parser.hpp"
#include "annplan/selectivity.hpp"
#include "annplan/serialize.hpp"
#include "annplan/stats.hpp"
#include "annplan/stats_io.hpp"
#include "annplan/synth.hpp"
#include "annplan/workload.hpp"
