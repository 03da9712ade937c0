#pragma once

#include "chansim/types.hpp"

namespace chansim {

// Default kappa0 in the exp(-kappa0 n mu eta^2 / b) tail; 1/(2 ln 2) makes
// the bound match the binary-KL Chernoff exponent to second order.
inline constexpr double kKappa0 = 0.72134752044448170368;  // 1 / (2 ln 2)

// Two-sided relative-deviation tail 2 exp(-kappa0 n mu eta^2 / b) for i.i.d.
// variables in [0, b] with mean mu.
double chernoff_tail(double n_samples, double mu, double eta, double b,
                     double kappa0 = kKappa0);

struct DeviationReport {
  double value = 0.0;
  bool exact = true;
  double std_error = 0.0;  // zero for exact accumulation
};

// Dilution: approximate the i.i.d. block law q^n by the push-forward of a
// uniform index through a random codeword table.
struct DilutionCode {
  Distribution q;
  int n = 0;
  SeqTable table;  // one codeword per row

  std::int64_t size() const { return table.rows(); }
};

DilutionCode dilute(const Distribution& q, int n, std::int64_t M, Rng& rng);
DilutionCode dilution_from_table(const Distribution& q, SeqTable table);

// Exact L1 distance between q^n and the table's empirical law.  Closed form:
// the empirical law is supported on at most M atoms, so
// || q^n - qt ||_1 = 1 - q^n(support) + sum_{support} |q^n - qt|.
DeviationReport dilution_deviation(const DilutionCode& code);

// Tail bound of the dilution failure event {deviation >= 2 eps} at block
// length n: 2 gamma exp(-kappa0 M eps^2 / gamma), gamma = 2^{n[H(q)+c delta]}.
double dilution_tail_bound(const Distribution& q, int n, std::int64_t M,
                           double delta, double eps, double kappa0 = kKappa0);

// Covering: reproduce, from the marginal p, the joint law of (uniform index,
// conditional sample) by a stochastic encoder onto the index set.
struct CoveringCode {
  Distribution q;    // law of the conditioning alphabet
  Channel backward;  // P(x|y): rows index y
  Distribution p;    // induced marginal on x
  int n = 0;
  SeqTable table;  // D(i): one conditioning codeword per row
  RMat encoder;    // E(i | x^n): |X|^n rows, M columns; rows sum to 1
  double delta = 0.0;
  double eps = 0.0;
  // Exact exponent parameters: log2 K bounds |T_{p,3delta}|, log2 k lower-
  // bounds the conditional probability decay on the gated conditional sets.
  double log2_K = 0.0;
  double log2_k = 0.0;
  double eta = 0.0;        // K / (k M), the covering overhead
  double trim_loss = 0.0;  // joint mass removed by the trimmed conditionals
  bool iota_holds = false; // empirical concentration event of the construction
  double max_subnorm = 0.0;  // max_x of the pre-fill-up row mass (<=1 under iota)

  std::int64_t size() const { return table.rows(); }
  std::int64_t num_inputs() const { return encoder.rows(); }
};

CoveringCode covering_encoder(const Distribution& q, const Channel& backward,
                              int n, std::int64_t M, double delta, double eps,
                              Rng& rng);
CoveringCode covering_from_table(const Distribution& q, const Channel& backward,
                                 SeqTable table, double delta, double eps);

// Exact L1 distance between the joint laws {u(i) P^n(x|D(i))} and
// {E(i|x) p^n(x)} over {1..M} x X^n.
DeviationReport covering_deviation(const CoveringCode& code);

// Importance-sampled estimate of the same distance (the path for block
// lengths whose exact accumulation would exceed the guards); per-index strata
// with reported standard error.
DeviationReport covering_deviation_mc(const CoveringCode& code,
                                      int samples_per_index, Rng& rng);

// Tail bound of the covering failure event {deviation >= 5 eps}:
// 2 K exp(-kappa0 M eps^3 k / K) with the code's exact K and k.
double covering_tail_bound(const CoveringCode& code, double kappa0 = kKappa0);

// Probability of a single symbol sequence under an i.i.d. law, in bits.
double log2_prob(const Distribution& p, const Seq& xn);
// log2 of prod_j backward(yn_j, xn_j).
double log2_cond_prob(const Channel& backward, const Seq& yn, const Seq& xn);

}  // namespace chansim
