#pragma once

#include "jdsv/asymptotics.hpp"
#include "jdsv/engine.hpp"
#include "jdsv/errors.hpp"
#include "jdsv/gauss_analytics.hpp"
#include "jdsv/grid.hpp"
#include "jdsv/levy.hpp"
#include "jdsv/random.hpp"
#include "jdsv/scenario.hpp"
#include "jdsv/special_functions.hpp"
#include "jdsv/vol_models.hpp"
