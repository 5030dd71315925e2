#pragma once

#include "gcoh/coherence.hpp"
#include "gcoh/core.hpp"
#include "gcoh/errors.hpp"
#include "gcoh/fock.hpp"
#include "gcoh/fock_oracle.hpp"
#include "gcoh/measurement.hpp"
#include "gcoh/monitoring.hpp"
#include "gcoh/rng.hpp"
#include "gcoh/states.hpp"
