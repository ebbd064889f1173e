#pragma once

#include "xva/errors.hpp"
#include "xva/market_model.hpp"
#include "xva/quadrature.hpp"
#include "xva/analytic_pricing.hpp"
#include "xva/closeout.hpp"
#include "xva/hedge.hpp"
#include "xva/xva_closed_form.hpp"
#include "xva/parallel.hpp"
#include "xva/bsde_engine.hpp"
#include "xva/mc_oracle.hpp"
#include "xva/scenario.hpp"
#include "xva/report.hpp"
