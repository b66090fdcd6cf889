#pragma once

// Everything except the JSON layer and the acceptance checks.

#include "krorder/choice.hpp"
#include "krorder/core.hpp"
#include "krorder/error.hpp"
#include "krorder/lp.hpp"
#include "krorder/measures.hpp"
#include "krorder/min_cost_flow.hpp"
#include "krorder/portfolio.hpp"
#include "krorder/preorder.hpp"
#include "krorder/random.hpp"
#include "krorder/separation.hpp"
#include "krorder/stochastic.hpp"
#include "krorder/tolerances.hpp"
#include "krorder/transport.hpp"
#include "krorder/uncertainty.hpp"
