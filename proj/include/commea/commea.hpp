#pragma once

#include "coevolution.hpp"
#include "core.hpp"
#include "dominance.hpp"
#include "metrics.hpp"
#include "niching.hpp"
#include "problems.hpp"
#include "variation.hpp"
