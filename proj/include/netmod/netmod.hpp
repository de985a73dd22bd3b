#pragma once

#include "netmod/dyadreg.hpp"
#include "netmod/ergm.hpp"
#include "netmod/errors.hpp"
#include "netmod/evolve.hpp"
#include "netmod/intervene.hpp"
#include "netmod/io.hpp"
#include "netmod/metrics.hpp"
#include "netmod/network.hpp"
#include "netmod/pipeline.hpp"
#include "netmod/rng.hpp"
#include "netmod/serialization.hpp"
