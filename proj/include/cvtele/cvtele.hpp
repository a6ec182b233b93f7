#pragma once

#include "cvtele/special_functions.hpp"
#include "cvtele/channel.hpp"
#include "cvtele/quadrature.hpp"
#include "cvtele/qubit_states.hpp"
#include "cvtele/fidelity_engine.hpp"
#include "cvtele/closed_forms.hpp"
#include "cvtele/sweep.hpp"
#include "cvtele/validate.hpp"
