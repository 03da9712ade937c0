#pragma once

#include <optional>
#include <unordered_map>

#include "chansim/concentration.hpp"
#include "chansim/hsw.hpp"
#include "chansim/qinfo.hpp"

namespace chansim {

// Rates in bits per symbol: classical communication r, common randomness c,
// and the classical payload s the receiver decodes from the side information.
struct Rates {
  double r = 0.0;
  double c = 0.0;
  double s = 0.0;
};

// Margin-bearing operating point: r = I(X;Y) - I(Y;B) + 4*k*delta,
// c = H(Y|X) - k*delta, s = I(Y;B) - k*delta (all clamped at zero), where k
// is the output-marginal exponent constant.  The margins make the dilution,
// covering and measurement steps simultaneously viable.
Rates default_rates(const ExtendedState& ext, double delta);

struct SimulationOptions {
  double delta = 0.2;  // typicality parameter of the covering construction
  double eps = 0.15;   // covering trim parameter
  HswOptions hsw;
};

// One shot of the simulation protocol: a shared codebook indexed by
// (l, m, s), per-l covering encoders over the (m, s) block, and per-(l, m)
// square-root measurements over the s slice.
struct SimulationCode {
  Ensemble source;
  Channel channel;
  ExtendedState ext;
  int n = 0;
  Rates rates;
  int num_l = 1, num_m = 1, num_s = 1;
  SeqTable codebook;  // row (l*num_m + m)*num_s + s
  std::vector<CoveringCode> encoders;  // one per l, over the (m,s) block
  SimulationOptions options;

  int row_of(int l, int m, int s) const {
    return (l * num_m + m) * num_s + s;
  }
  Seq word(int l, int m, int s) const {
    return codebook.row(row_of(l, m, s)).transpose();
  }
  // Tensor product of the sender's signal states along xn.
  Mat source_state(const Seq& xn) const;
  // Square-root measurement for the (l, m) slice; built on demand.
  HswCode slice_measurement(int l, int m) const;
};

SimulationCode build_simulation_code(const Ensemble& e, const Channel& w, int n,
                                     const Rates& rates, Rng& rng,
                                     const SimulationOptions& opts = {});

struct SimulationOutcome {
  Seq xn;
  int l = 0, m = 0, s = 0;
  int s_prime = 0;          // decoded payload; measurement failure maps to 0
  bool decode_failed = false;
  Seq y_tilde, y_hat;
  double disturbance = 0.0;
  std::optional<Mat> post;  // receiver's post-measurement block state
};

// fixed_l >= 0 pins the common-randomness index (the rate-distortion
// application evaluates each l separately); otherwise l is drawn uniformly.
SimulationOutcome simulate_once(const SimulationCode& code, const Seq& xn,
                                Rng& rng, bool keep_post = false,
                                int fixed_l = -1);
// Draws xn from p^n first.
SimulationOutcome simulate_once_sampled(const SimulationCode& code, Rng& rng,
                                        bool keep_post = false);

// Exact output of the protocol with the measurement marginalized out
// (receiver ignored): w_tilde(y|x) = sum_{l,m,s} u(l) E_l(ms|x) [y = word].
// joint[x] maps (y_tilde * |Y|^n + y_hat) to the probability of the pair
// (sender output, receiver output) given x, including the measurement.
struct ExactChannel {
  RMat w_tilde;
  std::vector<std::unordered_map<std::uint64_t, double>> joint;
  std::uint64_t num_y = 0;
};
ExactChannel exact_simulated_channel(const SimulationCode& code);

struct ErrorReport {
  double classical_l1 = 0.0;  // joint law of (X^n, Ytilde, Yhat) vs target
  bool classical_exact = false;
  double classical_se = 0.0;
  double mean_disturbance = 0.0;
  double disturbance_se = 0.0;
  double quantum_l1 = 0.0;  // full block-operator trace distance
  bool has_quantum = false;
  int trials = 0;
};

// Classical deviation is exact whenever the accumulation guards allow (the
// conditional laws are computed in closed form per x^n); otherwise it is a
// Monte Carlo average of exact conditional deviations over sampled x^n.
// The operator-level deviation is computed exactly for n <= 3.
ErrorReport estimate_simulation_error(const SimulationCode& code, int trials,
                                      Rng& rng);

struct DerandomizeResult {
  SimulationCode best;
  int best_index = 0;
  double best_score = 0.0;
  ErrorReport best_report;
  std::vector<double> scores;
};

// Builds `candidates` codes from derived streams and keeps the one with the
// smallest classical_l1 + mean_disturbance on a fixed evaluation stream.
DerandomizeResult derandomize(const Ensemble& e, const Channel& w, int n,
                              const Rates& rates, int candidates,
                              std::uint64_t seed, int eval_trials,
                              const SimulationOptions& opts = {});

// Sender samples y^n herself and ships it losslessly via a typical-set code
// at rate H(Y) + c delta; no side information used.  The deviation is exactly
// twice the atypical mass.
struct NaiveReport {
  double rate = 0.0;           // H(Y): the asymptotic cost of this scheme
  double achieved_rate = 0.0;  // log2(|T| + 1) / n at this block length
  double classical_l1 = 0.0;
  double mean_disturbance = 0.0;  // identically zero: nothing is measured
};
NaiveReport naive_baseline(const Ensemble& e, const Channel& w, int n,
                           double delta);

// Sequence/index conversions in lexicographic order.
std::int64_t seq_to_index(const Seq& seq, int alphabet);
Seq index_to_seq(std::int64_t index, int alphabet, int n);

}  // namespace chansim
