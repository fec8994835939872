#pragma once

#include <vector>

#include "logff/ffmodule.hpp"

namespace logff {

/// alpha_{g1,g2}: V~ (x)_{g1} R' -> V~ (x)_{g2} R' in the basis e~_k (x) 1.
struct GlueMap {
  RingMap g1;
  RingMap g2;
  Matrix G;
  int shells_used = 0;        // truncation bound N; shells 0..N were summed
  int last_nonzero_shell = 0;  // highest shell that contributed a nonzero term
};

/// Both maps go from m.spec to a common target and must agree modulo p.
GlueMap glue_map(const FilteredModule& m, const RingMap& g1, const RingMap& g2);
GlueMap glue_map(const FilteredModule& m, const FrobLift& l1, const FrobLift& l2);
/// Same result, one column at a time on the calling thread.
GlueMap glue_map_serial(const FilteredModule& m, const RingMap& g1, const RingMap& g2);

/// The defining series applied to an arbitrary element x of Fil^level, with
/// the sum cut at `shells` (default: the truncation bound). Coordinates are
/// in the target ring, basis e~_k (x) 1.
Vector glue_apply(const FilteredModule& m, const RingMap& g1, const RingMap& g2, const Vector& x, int level,
                  int shells = -1);

/// Shell c of the series applied to e~_k alone (for truncation diagnostics).
Vector glue_shell(const FilteredModule& m, const RingMap& g1, const RingMap& g2, int column, int c);

bool check_glue_identity(const FilteredModule& m, const FrobLift& l);
bool check_glue_cocycle(const FilteredModule& m, const FrobLift& l1, const FrobLift& l2, const FrobLift& l3);
/// alpha(r e_k (x) 1) = l1(r) * alpha(e~_k (x) 1) for every k.
bool check_glue_linearity(const FilteredModule& m, const FrobLift& l1, const FrobLift& l2, const RingElem& r);
CheckResult check_glue_horizontal(const FilteredModule& m, const RingMap& g1, const RingMap& g2);
bool check_glue_horizontal(const FilteredModule& m, const FrobLift& l1, const FrobLift& l2);

/// The gluing matrix on an all-Laurent chart, built from ordinary derivations
/// d/dT_j and the differences l1(T) - l2(T).
Matrix nonlog_glue_matrix(const FilteredModule& m, const FrobLift& l1, const FrobLift& l2);
bool check_nonlog_agreement(const FilteredModule& m, const FrobLift& l1, const FrobLift& l2);

/// Same (V, nabla, Fil); Frobenius F * alpha_{target, m.lift}.
LogFFModule transport(const LogFFModule& m, const FrobLift& target);

/// Base change along f with lift `source_lift` on the source (m is transported
/// to it first if needed) and `target_lift` on f's target.
LogFFModule pullback_ff(const LogFFModule& m, const RingMap& f, const FrobLift& source_lift, const FrobLift& target_lift);
/// Connection matrices of f^*(V, nabla) in the dlog frame of the target.
std::vector<Matrix> pullback_connection(const FilteredModule& m, const RingMap& f);

/// pullback(pullback(m, f), g) == pullback(m, g o f), lifts l0 -> l1 -> l2.
bool check_pullback_functorial(const LogFFModule& m, const RingMap& f, const RingMap& g, const FrobLift& l0,
                               const FrobLift& l1, const FrobLift& l2);

/// Frobenius lift with the given map as Phi. Throws IllegalMap if the map is
/// not of the form T_j |-> (1 + p u_j) T_j^p.
FrobLift lift_from_map(const RingMap& phi);
/// sigma Phi sigma^{-1} for sigma: T_j |-> c_j T_j.
FrobLift conjugate_lift(const FrobLift& l, const std::vector<std::int64_t>& units);
/// alpha computed in the coordinates c_j T_j equals sigma(alpha).
bool check_rescaling_invariance(const FilteredModule& m, const std::vector<std::int64_t>& units, const FrobLift& l1,
                                const FrobLift& l2);

}  // namespace logff
