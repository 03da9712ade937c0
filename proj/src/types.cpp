#include "chansim/types.hpp"

#include "chansim/linalg.hpp"

namespace chansim {

Distribution::Distribution(RVec probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw ValidationError("distribution: empty");
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    if (!(probs_[i] >= -kProbTol))
      throw ValidationError("distribution: negative entry");
    if (probs_[i] < 0) probs_[i] = 0.0;
  }
  if (std::abs(probs_.sum() - 1.0) > 1e-9)
    throw ValidationError("distribution: entries must sum to 1");
}

Distribution Distribution::uniform(int size) {
  return Distribution(RVec::Constant(size, 1.0 / size));
}

Seq Distribution::sample_sequence(int n, Rng& rng) const {
  Seq out(n);
  for (int i = 0; i < n; ++i) out[i] = sample(rng);
  return out;
}

Channel::Channel(RMat matrix) : m_(std::move(matrix)) {
  if (m_.rows() == 0 || m_.cols() == 0) throw ValidationError("channel: empty");
  for (Eigen::Index x = 0; x < m_.rows(); ++x) {
    for (Eigen::Index y = 0; y < m_.cols(); ++y) {
      if (!(m_(x, y) >= -kProbTol))
        throw ValidationError("channel: negative entry");
      if (m_(x, y) < 0) m_(x, y) = 0.0;
    }
    if (std::abs(m_.row(x).sum() - 1.0) > 1e-9)
      throw ValidationError("channel: row must sum to 1");
  }
}

Distribution Channel::push(const Distribution& p) const {
  if (p.size() != num_inputs())
    throw ValidationError("channel: prior size mismatch");
  RVec q = m_.transpose() * p.probs();
  return Distribution(q / q.sum());
}

DensityOperator::DensityOperator(Mat matrix) : m_(std::move(matrix)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw ValidationError("density operator: must be square");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("density operator: not hermitian");
  m_ = hermitize(m_);
  Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw ValidationError("density operator: negative eigenvalue");
  if (std::abs(m_.trace().real() - 1.0) > 1e-9)
    throw ValidationError("density operator: trace must be 1");
}

Ensemble::Ensemble(Distribution p, std::vector<DensityOperator> s)
    : prior(std::move(p)), states(std::move(s)) {
  if (static_cast<int>(states.size()) != prior.size())
    throw ValidationError("ensemble: prior size must match state count");
  for (const auto& st : states)
    if (st.dim() != states.front().dim())
      throw ValidationError("ensemble: states must share a dimension");
}

Mat Ensemble::average() const {
  Mat acc = Mat::Zero(dim(), dim());
  for (int x = 0; x < size(); ++x) acc += prior[x] * states[x].matrix();
  return acc;
}

Ensemble ExtendedState::output_ensemble() const {
  std::vector<DensityOperator> sts;
  sts.reserve(output_states.size());
  for (const Mat& m : output_states) sts.emplace_back(m);
  return Ensemble(output, sts);
}

}  // namespace chansim
