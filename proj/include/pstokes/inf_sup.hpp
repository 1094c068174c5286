#ifndef PSTOKES_INF_SUP_HPP
#define PSTOKES_INF_SUP_HPP

#include "pstokes/fe_system.hpp"

namespace pstokes {

/// Discrete inf-sup constant of the velocity/pressure pair at p = 2:
/// sqrt of the smallest eigenvalue of B A^{-1} B^T q = lambda M_p q on
/// zero-mean pressures, A the symmetric-gradient stiffness. The constant
/// pressure mode (eigenvalue 0) is deflated.
double inf_sup_constant(const FeSystem& sys);

/// The dense Schur complement B A^{-1} B^T (pressure x pressure).
Eigen::MatrixXd pressure_schur_complement(const FeSystem& sys);

}  // namespace pstokes

#endif
