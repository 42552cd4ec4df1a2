#pragma once

#include "pathrev/analysis.hpp"
#include "pathrev/combinat.hpp"
#include "pathrev/experiments.hpp"
#include "pathrev/graph.hpp"
#include "pathrev/protocol.hpp"
#include "pathrev/queueing.hpp"
#include "pathrev/rational.hpp"
#include "pathrev/report_io.hpp"
#include "pathrev/stats.hpp"
#include "pathrev/tree_core.hpp"
