#pragma once

#include "qrobust/rational.hpp"
#include "qrobust/model.hpp"
#include "qrobust/relax.hpp"
#include "qrobust/trailing.hpp"
#include "qrobust/search.hpp"
#include "qrobust/dep.hpp"
#include "qrobust/mip.hpp"
#include "qrobust/rng.hpp"
#include "qrobust/problems.hpp"
#include "qrobust/qipfile.hpp"
#include "qrobust/bench.hpp"
