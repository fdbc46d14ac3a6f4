#pragma once

#include "repgraph/decimal.hpp"
#include "repgraph/engine.hpp"
#include "repgraph/error.hpp"
#include "repgraph/node.hpp"
#include "repgraph/ontology.hpp"
#include "repgraph/params.hpp"
#include "repgraph/persistence.hpp"
#include "repgraph/pipeline.hpp"
#include "repgraph/simulator.hpp"
#include "repgraph/state.hpp"
#include "repgraph/temporal_graph.hpp"
#include "repgraph/weighting.hpp"
