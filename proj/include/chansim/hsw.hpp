#pragma once

#include "chansim/types.hpp"

namespace chansim {

struct HswOptions {
  // Conjugate the codeword states by the entropy-typical projector of the
  // average state's n-fold power before forming the measurement.
  bool typical_projection = false;
  double projection_delta = 0.25;  // half-width of the entropy window, bits
};

// Random block code over an ensemble {q(y), rho_y} decoded by the square-root
// measurement of the codeword states.
struct HswCode {
  Distribution q;
  std::vector<Mat> states;  // single-copy signal states
  int n = 0;
  SeqTable codewords;     // one message per row
  std::vector<Mat> povm;  // square-root-measurement element per message
  Mat fail;               // completion to the identity
  HswOptions options;

  int num_messages() const { return static_cast<int>(codewords.rows()); }
  int dim() const { return static_cast<int>(fail.rows()); }
  // Tensor product of the signal states along codeword s.
  Mat codeword_state(int s) const;
};

HswCode hsw_from_table(const Distribution& q, const std::vector<Mat>& states,
                       SeqTable codewords, const HswOptions& opts = {});

// Samples 2^{ceil(n rate)} codewords i.i.d. from q^n and builds the
// measurement.  rate is in bits per symbol.
HswCode build_hsw(const Ensemble& e, int n, double rate, Rng& rng,
                  const HswOptions& opts = {});

// pi(s'|s) = tr(Lambda_{s'} rho_{F(s)}) for all s', with the completion
// element's mass appended as the last entry.
RVec decode_distribution(const HswCode& code, int s);

struct HswErrorSummary {
  double mean_error = 0.0;  // mean_s sum_{s'} |pi(s'|s) - delta(s,s')|
  double max_error = 0.0;
  double mean_fail = 0.0;  // mean mass of the completion element
};
HswErrorSummary average_error(const HswCode& code);

struct MeasureOutcome {
  int outcome = -1;  // message index; -1 is the completion element
  Mat post;
  double disturbance = 0.0;  // trace distance between pre and post state
};

// Samples one measurement outcome on `state` and applies the square-root
// Kraus update.  Outcomes whose probability underflows map to the completion
// element with the state left untouched.
MeasureOutcome measure(const HswCode& code, const Mat& state, Rng& rng);

}  // namespace chansim
