#pragma once

#include "abo/acquisition.hpp"
#include "abo/benchmarks.hpp"
#include "abo/fusion.hpp"
#include "abo/gp.hpp"
#include "abo/optimizers.hpp"
#include "abo/random.hpp"
#include "abo/types.hpp"
