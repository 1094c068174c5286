#ifndef PSTOKES_ASSEMBLY_HPP
#define PSTOKES_ASSEMBLY_HPP

#include "pstokes/fe_system.hpp"

namespace pstokes {

enum class Constraints { eliminate, keep };

/// int xi_i . xi_j dx. With Constraints::keep the full velocity layout is
/// used and boundary dofs are not removed.
SparseMatrix assemble_mass(const FeSystem& sys, Constraints constraints = Constraints::eliminate);

/// int D xi_j : D xi_i dx, the p = 2 symmetric-gradient stiffness.
SparseMatrix assemble_stiffness(const FeSystem& sys);

/// B(i, j) = int eta_i div xi_j dx, rows pressure, columns velocity.
SparseMatrix assemble_divergence(const FeSystem& sys, Constraints constraints = Constraints::eliminate);

/// r_i = int S(D u) : D xi_i dx (free numbering).
Vector assemble_stress_residual(const FeSystem& sys, const PStructure& ps, const Field& u);

/// J(i, j) = int dS(D u)[D xi_j] : D xi_i dx in the velocity pattern, with the
/// shift floored at jac_floor inside the derivative.
SparseMatrix assemble_stress_jacobian(const FeSystem& sys, const PStructure& ps, const Field& u,
                                      double jac_floor);

/// int phi(|D u|) dx; its gradient is the stress residual.
double stress_energy(const FeSystem& sys, const PStructure& ps, const Field& u);

/// int f . xi_i dx with the given rule (free numbering).
Vector assemble_load(const FeSystem& sys, const std::function<Eigen::Vector2d(const Point&)>& f,
                     const QuadratureRule& rule = analytic_rule());

/// int S(grad) : D xi_i dx for an analytic velocity gradient.
Vector assemble_stress_load(const FeSystem& sys, const PStructure& ps,
                            const std::function<Tensor2(const Point&)>& gradient,
                            const QuadratureRule& rule = analytic_rule());

}  // namespace pstokes

#endif
