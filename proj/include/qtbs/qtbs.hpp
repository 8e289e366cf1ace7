#pragma once

#include "qtbs/net_model.hpp"
#include "qtbs/bottleneck.hpp"
#include "qtbs/gradients.hpp"
#include "qtbs/oracle.hpp"
#include "qtbs/routing.hpp"
#include "qtbs/planner.hpp"
#include "qtbs/report.hpp"
