#pragma once

#include "inarlab/chains.hpp"
#include "inarlab/dependence.hpp"
#include "inarlab/error.hpp"
#include "inarlab/harness.hpp"
#include "inarlab/io.hpp"
#include "inarlab/mixing.hpp"
#include "inarlab/parallel.hpp"
#include "inarlab/pmf.hpp"
#include "inarlab/rng.hpp"
#include "inarlab/sampling.hpp"
#include "inarlab/simulate.hpp"
#include "inarlab/stats.hpp"
#include "inarlab/svd.hpp"
#include "inarlab/window.hpp"
