#pragma once
//---------------------------------------------------------------------------
// Umbrella header for the sequence laboratory.
//---------------------------------------------------------------------------

#include "seqlab/binary_seq.hpp"
#include "seqlab/fractal.hpp"
#include "seqlab/grouping.hpp"
#include "seqlab/hierarchy.hpp"
#include "seqlab/percolation.hpp"
#include "seqlab/pipeline.hpp"
#include "seqlab/schedule.hpp"
#include "seqlab/stats.hpp"
#include "seqlab/util.hpp"
#include "seqlab/weighted_word.hpp"
