#include "chansim/typicality.hpp"

#include <cmath>

#include "chansim/qinfo.hpp"

namespace chansim {

namespace {
constexpr double kLogSlack = 1e-9;  // float slack for exact exponent bounds
}

TypicalityConstants typicality_constants(const Distribution& p) {
  TypicalityConstants tc;
  for (int x = 0; x < p.size(); ++x)
    if (p[x] > 0) tc.c += p[x] * std::abs(std::log2(p[x]));
  return tc;
}

TypicalityConstants typicality_constants(const Distribution& p, const Channel& q) {
  TypicalityConstants tc = typicality_constants(p);
  if (q.num_inputs() != p.size())
    throw ValidationError("typicality constants: channel input size mismatch");
  for (int x = 0; x < p.size(); ++x)
    for (int y = 0; y < q.num_outputs(); ++y)
      if (q(x, y) > 0)
        tc.c_prime += p[x] * q(x, y) * std::abs(std::log2(q(x, y)));
  return tc;
}

Eigen::VectorXi symbol_counts(const Seq& xn, int alphabet) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(alphabet);
  for (Eigen::Index j = 0; j < xn.size(); ++j) {
    if (xn[j] < 0 || xn[j] >= alphabet)
      throw ValidationError("symbol outside alphabet");
    ++counts[xn[j]];
  }
  return counts;
}

Eigen::MatrixXi joint_counts(const Seq& xn, const Seq& yn, int x_alpha, int y_alpha) {
  if (xn.size() != yn.size())
    throw ValidationError("joint counts: length mismatch");
  Eigen::MatrixXi joint = Eigen::MatrixXi::Zero(x_alpha, y_alpha);
  for (Eigen::Index j = 0; j < xn.size(); ++j) {
    if (xn[j] < 0 || xn[j] >= x_alpha || yn[j] < 0 || yn[j] >= y_alpha)
      throw ValidationError("symbol outside alphabet");
    ++joint(xn[j], yn[j]);
  }
  return joint;
}

Distribution empirical_type(const Seq& xn, int alphabet) {
  if (xn.size() == 0) throw ValidationError("empirical type: empty sequence");
  return Distribution(symbol_counts(xn, alphabet).cast<double>() /
                      static_cast<double>(xn.size()));
}

bool is_typical_counts(const Eigen::VectorXi& counts, int n, const Distribution& p,
                       double delta) {
  if (counts.size() != p.size())
    throw ValidationError("typicality: alphabet mismatch");
  for (int x = 0; x < p.size(); ++x) {
    double np = n * p[x];
    if (std::abs(counts[x] - np) > delta * np) return false;
  }
  return true;
}

bool is_typical(const Seq& xn, const Distribution& p, double delta) {
  return is_typical_counts(symbol_counts(xn, p.size()),
                           static_cast<int>(xn.size()), p, delta);
}

bool is_conditionally_typical_counts(const Eigen::MatrixXi& joint,
                                     const Channel& q, double delta) {
  if (joint.rows() != q.num_inputs() || joint.cols() != q.num_outputs())
    throw ValidationError("conditional typicality: alphabet mismatch");
  for (int x = 0; x < joint.rows(); ++x) {
    int nx = joint.row(x).sum();
    if (nx == 0) continue;
    for (int y = 0; y < joint.cols(); ++y) {
      double target = q(x, y) * nx;
      if (std::abs(joint(x, y) - target) > delta * target) return false;
    }
  }
  return true;
}

bool is_conditionally_typical(const Seq& yn, const Seq& xn, const Channel& q,
                              double delta) {
  return is_conditionally_typical_counts(
      joint_counts(xn, yn, q.num_inputs(), q.num_outputs()), q, delta);
}

bool is_hatted_typical(const Seq& out_seq, const Seq& cond_seq,
                       const Channel& q_cond, const Distribution& cond_marginal,
                       double delta, double delta_prime) {
  if (!is_typical(cond_seq, cond_marginal, delta_prime)) return false;
  return is_conditionally_typical(out_seq, cond_seq, q_cond, delta);
}

SetSummary typical_set_summary(const Distribution& p, int n, double delta) {
  if (n < 1) throw ValidationError("typical set: n must be >= 1");
  if (delta < 0) throw ValidationError("typical set: delta must be >= 0");
  const int k = p.size();
  RVec log2p = RVec::Zero(k);
  for (int x = 0; x < k; ++x) log2p[x] = p[x] > 0 ? std::log2(p[x]) : 0.0;

  double h = shannon_entropy(p);
  double c = typicality_constants(p).c;
  SetSummary s;
  s.log2_prob_lower = -n * (h + c * delta);
  s.log2_prob_upper = -n * (h - c * delta);
  s.min_log2_prob = 0.0;
  s.max_log2_prob = -std::numeric_limits<double>::infinity();
  bool member_bounds = true;

  for_each_sequence(k, n, [&](const Seq&, const Eigen::VectorXi& counts) {
    // Sequences containing a zero-probability symbol are never typical.
    for (int x = 0; x < k; ++x)
      if (counts[x] > 0 && p[x] <= 0) return;
    if (!is_typical_counts(counts, n, p, delta)) return;
    double lp = 0.0;
    for (int x = 0; x < k; ++x) lp += counts[x] * log2p[x];
    ++s.cardinality;
    s.mass += std::exp2(lp);
    s.min_log2_prob = std::min(s.cardinality == 1 ? lp : s.min_log2_prob, lp);
    s.max_log2_prob = std::max(s.max_log2_prob, lp);
    if (lp < s.log2_prob_lower - kLogSlack || lp > s.log2_prob_upper + kLogSlack)
      member_bounds = false;
  });

  s.epsilon = 1.0 - s.mass;
  s.card_log2_upper = n * (h + c * delta);
  s.card_log2_lower =
      s.mass > 0 ? std::log2(s.mass) + n * (h - c * delta)
                 : -std::numeric_limits<double>::infinity();
  double card_log2 =
      s.cardinality > 0 ? std::log2(static_cast<double>(s.cardinality))
                        : -std::numeric_limits<double>::infinity();
  s.bounds_hold = member_bounds && card_log2 <= s.card_log2_upper + kLogSlack &&
                  card_log2 >= s.card_log2_lower - kLogSlack;
  return s;
}

SetSummary conditional_typical_set_summary(const Channel& q, const Distribution& p,
                                           const Seq& xn, double delta,
                                           double delta_prime) {
  const int n = static_cast<int>(xn.size());
  if (n < 1) throw ValidationError("conditional typical set: empty sequence");
  if (delta < 0 || delta_prime < 0)
    throw ValidationError("conditional typical set: deltas must be >= 0");
  const int kx = q.num_inputs();
  const int ky = q.num_outputs();

  RMat log2q = RMat::Zero(kx, ky);
  for (int x = 0; x < kx; ++x)
    for (int y = 0; y < ky; ++y) log2q(x, y) = q(x, y) > 0 ? std::log2(q(x, y)) : 0.0;

  // Conditional entropy and exponent constant under the hypothesis marginal.
  double h_cond = 0.0;
  for (int x = 0; x < kx; ++x)
    for (int y = 0; y < ky; ++y)
      if (q(x, y) > 0) h_cond -= p[x] * q(x, y) * log2q(x, y);
  double c_prime = typicality_constants(p, q).c_prime;
  double eff = delta + delta_prime + delta * delta_prime;

  // Blown-up references for the closure checks.
  RMat joint_ref(kx, ky);
  for (int x = 0; x < kx; ++x)
    for (int y = 0; y < ky; ++y) joint_ref(x, y) = p[x] * q(x, y);
  RVec q_marg = joint_ref.colwise().sum();

  SetSummary s;
  s.hypothesis_holds = is_typical(xn, p, delta_prime);
  s.log2_prob_lower = -n * (h_cond + c_prime * eff);
  s.log2_prob_upper = -n * (h_cond - c_prime * eff);
  s.min_log2_prob = 0.0;
  s.max_log2_prob = -std::numeric_limits<double>::infinity();
  bool member_bounds = true;
  bool closure = true;

  for_each_conditional_sequence(
      xn, kx, ky, [&](const Seq&, const Eigen::MatrixXi& joint) {
        for (int x = 0; x < kx; ++x)
          for (int y = 0; y < ky; ++y)
            if (joint(x, y) > 0 && q(x, y) <= 0) return;
        if (!is_conditionally_typical_counts(joint, q, delta)) return;
        double lp = 0.0;
        for (int x = 0; x < kx; ++x)
          for (int y = 0; y < ky; ++y) lp += joint(x, y) * log2q(x, y);
        ++s.cardinality;
        s.mass += std::exp2(lp);
        s.min_log2_prob = std::min(s.cardinality == 1 ? lp : s.min_log2_prob, lp);
        s.max_log2_prob = std::max(s.max_log2_prob, lp);
        if (lp < s.log2_prob_lower - kLogSlack ||
            lp > s.log2_prob_upper + kLogSlack)
          member_bounds = false;
        // Closure: joint type within (1 +- eff) of p*Q, output marginal within
        // (1 +- eff) of the induced marginal.
        for (int x = 0; x < kx && closure; ++x)
          for (int y = 0; y < ky; ++y) {
            double target = n * joint_ref(x, y);
            if (std::abs(joint(x, y) - target) > eff * target + kLogSlack) {
              closure = false;
              break;
            }
          }
        for (int y = 0; y < ky && closure; ++y) {
          int ny = joint.col(y).sum();
          double target = n * q_marg[y];
          if (std::abs(ny - target) > eff * target + kLogSlack) closure = false;
        }
      });

  s.epsilon = 1.0 - s.mass;
  s.card_log2_upper = n * (h_cond + c_prime * eff);
  s.card_log2_lower =
      s.mass > 0 ? std::log2(s.mass) + n * (h_cond - c_prime * eff)
                 : -std::numeric_limits<double>::infinity();
  double card_log2 =
      s.cardinality > 0 ? std::log2(static_cast<double>(s.cardinality))
                        : -std::numeric_limits<double>::infinity();
  bool card_ok = card_log2 <= s.card_log2_upper + kLogSlack &&
                 card_log2 >= s.card_log2_lower - kLogSlack;
  // The exponent bounds are only guaranteed under the hypothesis.
  s.closure_holds = !s.hypothesis_holds || closure;
  s.bounds_hold = !s.hypothesis_holds || (member_bounds && card_ok && closure);
  return s;
}

double typical_mass_mc(const Distribution& p, int n, double delta, int trials,
                       Rng& rng) {
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    Seq xn = p.sample_sequence(n, rng);
    if (is_typical(xn, p, delta)) ++hits;
  }
  return static_cast<double>(hits) / trials;
}

}  // namespace chansim
