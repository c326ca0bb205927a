#pragma once

#include "fairpo/counterfactual.hpp"
#include "fairpo/csv.hpp"
#include "fairpo/dgp.hpp"
#include "fairpo/experiments.hpp"
#include "fairpo/fairness.hpp"
#include "fairpo/mitigation.hpp"
#include "fairpo/models.hpp"
#include "fairpo/rng.hpp"
#include "fairpo/selfcheck.hpp"
#include "fairpo/tabular.hpp"
