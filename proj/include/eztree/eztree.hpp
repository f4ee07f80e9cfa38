#pragma once

#include "eztree/cli.hpp"
#include "eztree/dynamics.hpp"
#include "eztree/errors.hpp"
#include "eztree/pricing.hpp"
#include "eztree/scenario.hpp"
#include "eztree/simulation.hpp"
#include "eztree/statics.hpp"
#include "eztree/types.hpp"
