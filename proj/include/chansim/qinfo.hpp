#pragma once

#include "chansim/types.hpp"

namespace chansim {

// All entropies and rates are in bits (logs base 2).

double shannon_entropy(const Distribution& p);
double shannon_entropy_raw(const RVec& p);

double von_neumann_entropy(const DensityOperator& rho);
double von_neumann_entropy_raw(const Mat& rho);

// Block-diagonal embedding sum_x p(x) |x><x| (x) rho_x of an ensemble.
DensityOperator embed_cq(const Ensemble& e);

// H(sum_x p(x) rho_x) - sum_x p(x) H(rho_x).
double holevo_information(const Ensemble& e);

// I(A;B) for the bipartition (a | b) of the subsystems listed in dims.
double mutual_information(const Mat& rho, const std::vector<int>& dims,
                          const std::vector<int>& a, const std::vector<int>& b);

// I(A;B|C) = H(AC) + H(BC) - H(ABC) - H(C); non-negative by strong
// subadditivity.
double conditional_mutual_information(const Mat& rho, const std::vector<int>& dims,
                                      const std::vector<int>& a,
                                      const std::vector<int>& b,
                                      const std::vector<int>& c);

// Classical mutual information of a joint probability matrix.
double mutual_information_classical(const RMat& joint);

// Pushes the ensemble's classical label through W and assembles the joint
// picture (output marginal, backward channel, receiver states given y).
ExtendedState apply_channel(const Ensemble& e, const Channel& w);

// Achievable (communication R, common randomness C) region for simulating the
// channel on the source when the receiver holds the ensemble's quantum side
// information: R >= r_min and R + C >= sum_min.
struct RateRegion {
  double r_min = 0.0;    // I(X;Y) - I(Y;B)
  double sum_min = 0.0;  // H(Y|B)
  bool contains(const RatePoint& pt, double tol = 1e-9) const {
    return pt.r >= r_min - tol && pt.r + pt.c >= sum_min - tol;
  }
};
RateRegion simulation_region(const Ensemble& e, const Channel& w);
RateRegion simulation_region(const ExtendedState& ext);

// Entropy-continuity bound eps * log2(d) + tau(eps), where tau(eps) is
// -eps*log2(eps) for eps <= 1/4 and 1/2 otherwise.
double fannes_bound(double eps, double dim);

}  // namespace chansim
