#pragma once

#include "feemarket/core.hpp"
#include "feemarket/rng.hpp"
#include "feemarket/losses.hpp"
#include "feemarket/packing.hpp"
#include "feemarket/controllers.hpp"
#include "feemarket/adversaries.hpp"
#include "feemarket/evaluation.hpp"
#include "feemarket/simulation.hpp"
#include "feemarket/config.hpp"
#include "feemarket/verify.hpp"
