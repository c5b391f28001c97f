#pragma once

#include "bernstein.hpp"
#include "bounds.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "model.hpp"
#include "moduli.hpp"
#include "risklab.hpp"
