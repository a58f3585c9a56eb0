#pragma once

// Umbrella header for the streamdt library.

#include "streamdt/batch.hpp"
#include "streamdt/csv.hpp"
#include "streamdt/efdt.hpp"
#include "streamdt/evaluation.hpp"
#include "streamdt/merit.hpp"
#include "streamdt/params.hpp"
#include "streamdt/rng.hpp"
#include "streamdt/schema.hpp"
#include "streamdt/stats.hpp"
#include "streamdt/stream.hpp"
#include "streamdt/tree.hpp"
#include "streamdt/vfdt.hpp"
