#ifndef PSTOKES_INTERPOLATION_HPP
#define PSTOKES_INTERPOLATION_HPP

#include "pstokes/fe_system.hpp"

namespace pstokes {

/// Scott-Zhang type quasi-interpolant into the P1 part of the velocity space.
///
/// Each interior vertex takes the value at that vertex of the L2 projection
/// of w onto P1 over its lowest-index adjacent cell; boundary vertices and
/// bubbles get 0. Reproduces P1 fields with zero trace.
Field scott_zhang(const FeSystem& sys, const VectorFunction& w);

/// Divergence-preserving interpolant Pi_SZ w - sum_T c_T b_T with
/// c_T = mean_T(Pi_SZ w - w) / mean_T(b_T). Its cell means coincide with those
/// of w, so (div Pi w, eta_h) = (div w, eta_h) for every P1 pressure eta_h.
Field interp_div(const FeSystem& sys, const VectorFunction& w);

/// Clement type pressure interpolant: nodal value = mean of q over the cells
/// adjacent to the vertex.
Field interp_pressure(const FeSystem& sys, const ScalarFunction& q);

/// Mean of the bubble 27 l0 l1 l2 over its cell.
inline constexpr double kBubbleMean = 27.0 / 60.0;

}  // namespace pstokes

#endif
