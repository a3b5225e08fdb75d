#pragma once

#include "dgair/assembly.hpp"
#include "dgair/model.hpp"
#include "dgair/space.hpp"

namespace dgair {

/// ||U_h||_{L2}
double l2_norm(const DGField& field);

/// Total mass int U_h.
double total_mass(const DGField& field);

/// ||U_h - u(., t)||_{L2}
double l2_error(const DGField& field, const expr::ExprPtr& exact, double t);

/// Energy seminorm
///   (sum_E ||D^{1/2} grad v||^2 + sum_e sigma_e/|e|^beta0 ||[v]||^2)^{1/2},
/// D = diag(kx, ky). EdgeSet::interior gives the seminorm proper; EdgeSet::all
/// adds boundary jumps, which makes it a norm on the discrete space.
double energy_seminorm(const DGField& field, const ProblemSpec& spec, const PenaltyConfig& penalty,
                       EdgeSet edges = EdgeSet::interior);

/// Energy seminorm of U_h - u(., t); jumps of u vanish, so only U_h jumps enter.
double energy_error(const DGField& field, const ExactSolution& exact, double t, const ProblemSpec& spec,
                    const PenaltyConfig& penalty, EdgeSet edges = EdgeSet::interior);

}  // namespace dgair
