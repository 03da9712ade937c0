#pragma once

#include <cstdint>

#include "chansim/types.hpp"

namespace chansim {

// Robust (relative-error) typicality: a sequence is delta-typical when every
// symbol's empirical frequency deviates from p(x) by at most delta * p(x).
// The exponent constants below make every bound an exact algebraic
// consequence of membership, so enumeration checks need no asymptotics.

struct TypicalityConstants {
  double c = 0.0;        // sum_x p(x) |log2 p(x)|
  double c_prime = 0.0;  // sum_{x,y} p(x) Q(y|x) |log2 Q(y|x)|
};

TypicalityConstants typicality_constants(const Distribution& p);
TypicalityConstants typicality_constants(const Distribution& p, const Channel& q);

Eigen::VectorXi symbol_counts(const Seq& xn, int alphabet);
Eigen::MatrixXi joint_counts(const Seq& xn, const Seq& yn, int x_alpha, int y_alpha);
Distribution empirical_type(const Seq& xn, int alphabet);

bool is_typical_counts(const Eigen::VectorXi& counts, int n, const Distribution& p,
                       double delta);
bool is_typical(const Seq& xn, const Distribution& p, double delta);

// Conditional membership: N(x,y) within (1 +- delta) Q(y|x) N(x) for every
// pair; vacuous for symbols x that do not occur.
bool is_conditionally_typical_counts(const Eigen::MatrixXi& joint,
                                     const Channel& q, double delta);
bool is_conditionally_typical(const Seq& yn, const Seq& xn, const Channel& q,
                              double delta);

// Conditional set gated on the conditioning sequence's own typicality: empty
// whenever cond_seq is not delta_prime-typical for cond_marginal.
bool is_hatted_typical(const Seq& out_seq, const Seq& cond_seq,
                       const Channel& q_cond, const Distribution& cond_marginal,
                       double delta, double delta_prime);

// Streams all alphabet^n sequences in lexicographic order with incrementally
// maintained symbol counts.  Guarded at 2^24 sequences.
template <class F>
void for_each_sequence(int alphabet, int n, F&& visit) {
  if (n < 1 || alphabet < 1)
    throw ValidationError("sequence enumeration: need n >= 1, alphabet >= 1");
  std::uint64_t total =
      checked_pow(alphabet, n, kEnumerationGuard, "sequence enumeration");
  Seq seq = Seq::Zero(n);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(alphabet);
  counts[0] = n;
  for (std::uint64_t it = 0;;) {
    visit(static_cast<const Seq&>(seq), static_cast<const Eigen::VectorXi&>(counts));
    if (++it == total) break;
    int pos = n - 1;
    while (true) {
      --counts[seq[pos]];
      if (seq[pos] + 1 < alphabet) {
        ++seq[pos];
        ++counts[seq[pos]];
        break;
      }
      seq[pos] = 0;
      ++counts[0];
      --pos;
    }
  }
}

// Same odometer over output sequences, maintaining joint counts against a
// fixed conditioning sequence.
template <class F>
void for_each_conditional_sequence(const Seq& cond_seq, int cond_alpha,
                                   int out_alpha, F&& visit) {
  const int n = static_cast<int>(cond_seq.size());
  if (n < 1 || cond_alpha < 1 || out_alpha < 1)
    throw ValidationError("sequence enumeration: bad arguments");
  std::uint64_t total =
      checked_pow(out_alpha, n, kEnumerationGuard, "sequence enumeration");
  Seq seq = Seq::Zero(n);
  Eigen::MatrixXi joint = Eigen::MatrixXi::Zero(cond_alpha, out_alpha);
  for (int j = 0; j < n; ++j) ++joint(cond_seq[j], 0);
  for (std::uint64_t it = 0;;) {
    visit(static_cast<const Seq&>(seq),
          static_cast<const Eigen::MatrixXi&>(joint));
    if (++it == total) break;
    int pos = n - 1;
    while (true) {
      --joint(cond_seq[pos], seq[pos]);
      if (seq[pos] + 1 < out_alpha) {
        ++seq[pos];
        ++joint(cond_seq[pos], seq[pos]);
        break;
      }
      seq[pos] = 0;
      ++joint(cond_seq[pos], 0);
      --pos;
    }
  }
}

// Exhaustive scan of a (conditional) typical set together with the exact
// exponent bounds it must satisfy.
struct SetSummary {
  std::uint64_t cardinality = 0;
  double mass = 0.0;     // probability of the set under the reference law
  double epsilon = 1.0;  // 1 - mass
  double min_log2_prob = 0.0;
  double max_log2_prob = 0.0;
  double log2_prob_lower = 0.0;  // -n (H + c delta): member probabilities
  double log2_prob_upper = 0.0;  // -n (H - c delta)
  double card_log2_upper = 0.0;  // n (H + c delta)
  double card_log2_lower = 0.0;  // log2(mass) + n (H - c delta)
  bool bounds_hold = false;
  bool hypothesis_holds = true;  // conditional case: conditioning seq typical
  bool closure_holds = true;     // conditional case: joint/marginal blow-up
};

SetSummary typical_set_summary(const Distribution& p, int n, double delta);

// Scans T_{Q,delta}(xn).  The exponent bounds are exact consequences of
// membership whenever xn is delta_prime-typical for p; the effective exponent
// parameter is delta + delta_prime + delta*delta_prime.
SetSummary conditional_typical_set_summary(const Channel& q, const Distribution& p,
                                           const Seq& xn, double delta,
                                           double delta_prime);

// Monte Carlo membership frequency for block lengths beyond the enumeration
// guard.
double typical_mass_mc(const Distribution& p, int n, double delta, int trials,
                       Rng& rng);

}  // namespace chansim
