#pragma once

#include <string>

#include "chansim/types.hpp"

namespace chansim {

// Pure state on R (x) A_hat (x) B_hat (x) B.  The sender holds A_hat B_hat,
// the receiver holds B, R is the purifying reference; the task moves B_hat
// across.  Trivial subsystems are dimension 1.
struct FourPartyPureState {
  CVec amplitudes;        // unit norm, indexed with R most significant
  std::vector<int> dims;  // {R, A_hat, B_hat, B}

  Mat density() const { return amplitudes * amplitudes.adjoint(); }
  std::int64_t total_dim() const { return amplitudes.size(); }
};

// Validates shape and norm (inputs are renormalized; deviations beyond 1e-6
// are rejected as malformed).
FourPartyPureState make_four_party(CVec amplitudes, std::vector<int> dims);
FourPartyPureState random_four_party(const std::vector<int>& dims, Rng& rng);

// Qubit rate Q and entanglement rate E; E < 0 means ebits are generated.
struct QEPoint {
  double q = 0.0;
  double e = 0.0;
  std::string label;
};

struct OuterBound {
  double q_min = 0.0;      // (1/2) I(B_hat; R | A_hat)
  double qe_sum_min = 0.0; // H(B_hat | B)
};
OuterBound outer_bound(const FourPartyPureState& psi);

// Corner reached by merging B_hat toward the B side: ((1/2) I(B_hat; R A_hat),
// -(1/2) I(B; B_hat)).
QEPoint fqsw_corner(const FourPartyPureState& psi);
// Corner reached by simulating the B_hat channel: ((1/2) I(B_hat; R B),
// (1/2) I(B_hat; A_hat)).
QEPoint fqrs_corner(const FourPartyPureState& psi);

struct QERegion {
  OuterBound bound;
  std::vector<QEPoint> corners;  // labels "fqsw", "fqrs"
  bool a_hat_trivial = false;
  bool b_trivial = false;
  // Degenerate tightness: with A_hat trivial the fqsw corner sits on both
  // bounding lines; with B trivial the fqrs corner does.
  bool fqsw_tight = false;
  bool fqrs_tight = false;

  bool contains(const QEPoint& pt, double tol = 1e-9) const {
    return pt.q >= bound.q_min - tol &&
           pt.q + pt.e >= bound.qe_sum_min - tol;
  }
};
QERegion region_report(const FourPartyPureState& psi);

}  // namespace chansim
