#pragma once

// Umbrella header.

#include "seqforge/error.hpp"
#include "seqforge/seqdiff.hpp"
#include "seqforge/grammar.hpp"
#include "seqforge/operators.hpp"
#include "seqforge/archive.hpp"
#include "seqforge/fitness.hpp"
#include "seqforge/oracle.hpp"
#include "seqforge/stats.hpp"
#include "seqforge/engine.hpp"
#include "seqforge/reference.hpp"
#include "seqforge/config.hpp"
#include "seqforge/analysis.hpp"
