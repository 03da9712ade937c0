#pragma once

#include <vector>

#include "chansim/common.hpp"
#include "chansim/rng.hpp"

namespace chansim {

inline constexpr double kProbTol = 1e-12;

// Probability vector over a finite alphabet.
class Distribution {
 public:
  explicit Distribution(RVec probs);
  static Distribution uniform(int size);

  const RVec& probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[i]; }

  int sample(Rng& rng) const { return rng.categorical(probs_); }
  Seq sample_sequence(int n, Rng& rng) const;

 private:
  RVec probs_;
};

// Row-stochastic matrix; row x is the output distribution given input x.
class Channel {
 public:
  explicit Channel(RMat matrix);

  const RMat& matrix() const { return m_; }
  int num_inputs() const { return static_cast<int>(m_.rows()); }
  int num_outputs() const { return static_cast<int>(m_.cols()); }
  double operator()(int x, int y) const { return m_(x, y); }
  Distribution row(int x) const { return Distribution(m_.row(x).transpose()); }

  // Output marginal q = p W.
  Distribution push(const Distribution& p) const;

 private:
  RMat m_;
};

// Hermitian, positive semidefinite, unit trace (raw matrix helpers below skip
// the validation for internal arithmetic).
class DensityOperator {
 public:
  explicit DensityOperator(Mat matrix);

  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Mat m_;
};

// Classical prior over quantum signal states of a common dimension.
struct Ensemble {
  Distribution prior;
  std::vector<DensityOperator> states;

  Ensemble(Distribution p, std::vector<DensityOperator> s);
  int size() const { return prior.size(); }
  int dim() const { return states.front().dim(); }
  // Barycenter sum_x p(x) rho_x.
  Mat average() const;
};

// The joint classical-quantum picture after a channel acts on the ensemble's
// classical label: joint p(x)W(y|x), output marginal q(y), and the states the
// receiver holds conditioned on either label.
struct ExtendedState {
  Ensemble source;          // {p(x), rho_x}
  Channel channel;          // W(y|x)
  RMat joint;               // joint(x, y) = p(x) W(y|x)
  Distribution output;      // q(y)
  RMat backward;            // backward(y, x) = P(x|y); rows with q(y)=0 are uniform
  std::vector<Mat> output_states;  // rho_y = sum_x P(x|y) rho_x

  Ensemble output_ensemble() const;
};

struct RatePoint {
  double r = 0.0;  // classical communication
  double c = 0.0;  // common randomness
};

}  // namespace chansim
