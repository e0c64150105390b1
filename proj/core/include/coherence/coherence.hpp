#pragma once

#include "coherence/closed_loop.hpp"
#include "coherence/errors.hpp"
#include "coherence/gains_config.hpp"
#include "coherence/graph.hpp"
#include "coherence/h2.hpp"
#include "coherence/io.hpp"
#include "coherence/lyapunov.hpp"
#include "coherence/scaling.hpp"
#include "coherence/simulate.hpp"
#include "coherence/tuning.hpp"
