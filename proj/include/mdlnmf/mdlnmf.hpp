#ifndef MDLNMF_MDLNMF_HPP
#define MDLNMF_MDLNMF_HPP

// Non-negative matrix factorization with a description-length objective:
// the solver trades the bits needed to encode the factors against the bits
// needed to encode the residual, with multiplicative-update and
// sparseness-constrained baselines and a semi-synthetic recovery harness.

#include "baselines.hpp"
#include "core.hpp"
#include "csv.hpp"
#include "distfit.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "objective.hpp"
#include "report.hpp"
#include "solver.hpp"
#include "svg.hpp"
#include "synthgen.hpp"

#endif  // MDLNMF_MDLNMF_HPP
