#pragma once

// Gauge-invariant tensor networks for one-dimensional quantum link models:
// gauge-reduced local bases, link-constraint MPOs, charge-blocked MPDO time
// evolution, and cellular-automaton Hilbert-space counting.

#include "qlink/automaton.hpp"
#include "qlink/config.hpp"
#include "qlink/csv.hpp"
#include "qlink/evolve.hpp"
#include "qlink/gate.hpp"
#include "qlink/gauge_reduction.hpp"
#include "qlink/hamiltonian.hpp"
#include "qlink/kernels.hpp"
#include "qlink/link_constraint.hpp"
#include "qlink/local_ops.hpp"
#include "qlink/log.hpp"
#include "qlink/model.hpp"
#include "qlink/mpdo.hpp"
#include "qlink/oracle.hpp"
#include "qlink/trotter.hpp"
#include "qlink/types.hpp"
#include "qlink/validate.hpp"
