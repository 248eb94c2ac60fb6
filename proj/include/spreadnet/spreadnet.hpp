#pragma once

// Event-driven exact simulation of multi-compartment spreading processes over
// weighted, directed, multilayer networks.

#include "spreadnet/engine.hpp"
#include "spreadnet/ensemble.hpp"
#include "spreadnet/generators.hpp"
#include "spreadnet/graph.hpp"
#include "spreadnet/model.hpp"
#include "spreadnet/observables.hpp"
#include "spreadnet/oracle.hpp"
#include "spreadnet/queue.hpp"
#include "spreadnet/rng.hpp"
