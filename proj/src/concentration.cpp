#include "chansim/concentration.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "chansim/qinfo.hpp"
#include "chansim/typicality.hpp"

namespace chansim {

double chernoff_tail(double n_samples, double mu, double eta, double b,
                     double kappa0) {
  if (!(eta > 0.0 && eta <= 0.5))
    throw ValidationError("chernoff_tail: eta must lie in (0, 1/2]");
  if (!(b > 0.0) || mu < 0.0 || mu > b)
    throw ValidationError("chernoff_tail: need 0 <= mu <= b, b > 0");
  if (n_samples < 0) throw ValidationError("chernoff_tail: negative sample count");
  return 2.0 * std::exp(-kappa0 * n_samples * mu * eta * eta / b);
}

double log2_prob(const Distribution& p, const Seq& xn) {
  double lp = 0.0;
  for (Eigen::Index j = 0; j < xn.size(); ++j) {
    double v = p[xn[j]];
    if (v <= 0) return -std::numeric_limits<double>::infinity();
    lp += std::log2(v);
  }
  return lp;
}

double log2_cond_prob(const Channel& backward, const Seq& yn, const Seq& xn) {
  if (yn.size() != xn.size())
    throw ValidationError("log2_cond_prob: length mismatch");
  double lp = 0.0;
  for (Eigen::Index j = 0; j < xn.size(); ++j) {
    double v = backward(yn[j], xn[j]);
    if (v <= 0) return -std::numeric_limits<double>::infinity();
    lp += std::log2(v);
  }
  return lp;
}

DilutionCode dilution_from_table(const Distribution& q, SeqTable table) {
  if (table.rows() < 1 || table.cols() < 1)
    throw ValidationError("dilution: empty table");
  for (Eigen::Index i = 0; i < table.rows(); ++i)
    for (Eigen::Index j = 0; j < table.cols(); ++j)
      if (table(i, j) < 0 || table(i, j) >= q.size())
        throw ValidationError("dilution: symbol outside alphabet");
  return DilutionCode{q, static_cast<int>(table.cols()), std::move(table)};
}

DilutionCode dilute(const Distribution& q, int n, std::int64_t M, Rng& rng) {
  if (n < 1) throw ValidationError("dilute: n must be >= 1");
  if (M < 1) throw ValidationError("dilute: M must be >= 1");
  if (static_cast<std::uint64_t>(M) > kEnumerationGuard)
    throw GuardExceeded("dilute: table size exceeds guard");
  SeqTable table(M, n);
  for (std::int64_t i = 0; i < M; ++i)
    table.row(i) = q.sample_sequence(n, rng).transpose();
  return DilutionCode{q, n, std::move(table)};
}

namespace {
struct SeqHash {
  size_t operator()(const std::vector<int>& v) const {
    size_t h = 0xCBF29CE484222325ull;
    for (int x : v) {
      h ^= static_cast<size_t>(x) + 0x9E3779B9u;
      h *= 0x100000001B3ull;
    }
    return h;
  }
};
}  // namespace

DeviationReport dilution_deviation(const DilutionCode& code) {
  const std::int64_t M = code.size();
  std::unordered_map<std::vector<int>, std::int64_t, SeqHash> counts;
  counts.reserve(static_cast<size_t>(M) * 2);
  std::vector<int> buf(code.n);
  for (std::int64_t i = 0; i < M; ++i) {
    for (int j = 0; j < code.n; ++j) buf[j] = code.table(i, j);
    ++counts[buf];
  }
  // || q^n - qt ||_1 = (1 - q^n(support)) + sum_{support} |q^n(s) - qt(s)|
  double support_mass = 0.0;
  double on_support = 0.0;
  Seq s(code.n);
  for (const auto& [seq, cnt] : counts) {
    for (int j = 0; j < code.n; ++j) s[j] = seq[j];
    double qn = std::exp2(log2_prob(code.q, s));
    support_mass += qn;
    on_support += std::abs(qn - static_cast<double>(cnt) / M);
  }
  return DeviationReport{(1.0 - support_mass) + on_support, true, 0.0};
}

double dilution_tail_bound(const Distribution& q, int n, std::int64_t M,
                           double delta, double eps, double kappa0) {
  if (n < 1 || M < 1 || !(delta > 0) || !(eps > 0))
    throw ValidationError("dilution bound: need n, M >= 1 and delta, eps > 0");
  double gamma = std::exp2(n * (shannon_entropy(q) + typicality_constants(q).c * delta));
  return 2.0 * gamma * std::exp(-kappa0 * M * eps * eps / gamma);
}

namespace {

double log2_multinomial(const Eigen::VectorXi& parts) {
  int total = parts.sum();
  double v = std::lgamma(total + 1.0);
  for (Eigen::Index i = 0; i < parts.size(); ++i)
    v -= std::lgamma(parts[i] + 1.0);
  return v / std::numbers::ln2;
}

// w(x^n) = sum over y^n of q^n(y^n) P^n(x^n|y^n) restricted to y^n typical
// and x^n conditionally typical given y^n.  The sum collapses onto joint
// count matrices; for each one the number of consistent y^n (with x^n fixed)
// is a product of per-symbol multinomials.
class WeightEvaluator {
 public:
  WeightEvaluator(const Distribution& q, const Channel& backward, int n,
                  double delta)
      : q_(q), backward_(backward), n_(n), delta_(delta),
        ky_(q.size()), kx_(backward.num_outputs()),
        log2qp_(ky_, kx_) {
    for (int y = 0; y < ky_; ++y)
      for (int x = 0; x < kx_; ++x) {
        double v = q_[y] * backward_(y, x);
        log2qp_(y, x) = v > 0 ? std::log2(v) : 0.0;
      }
  }

  // log2 w(x^n) given the symbol counts of x^n; -inf when the admissible set
  // is empty.
  double log2_weight(const Eigen::VectorXi& xcounts) const {
    // Enumeration size guard: product over x of compositions of N(x).
    double size_est = 0.0;
    for (int x = 0; x < kx_; ++x)
      size_est += (ky_ - 1) * std::log2(xcounts[x] + 1.0);
    if (size_est > 22.0)
      throw GuardExceeded("covering weight: count-matrix enumeration too large");

    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(ky_, kx_);
    double acc = 0.0;
    recurse(xcounts, m, 0, acc);
    return acc > 0 ? std::log2(acc) : -std::numeric_limits<double>::infinity();
  }

 private:
  void recurse(const Eigen::VectorXi& xcounts, Eigen::MatrixXi& m, int x,
               double& acc) const {
    if (x == kx_) {
      leaf(m, acc);
      return;
    }
    // Compositions of xcounts[x] into ky_ parts, filled in column x.
    compose(xcounts, m, x, 0, xcounts[x], acc);
  }

  void compose(const Eigen::VectorXi& xcounts, Eigen::MatrixXi& m, int x, int y,
               int remaining, double& acc) const {
    if (y == ky_ - 1) {
      m(y, x) = remaining;
      recurse(xcounts, m, x + 1, acc);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      m(y, x) = v;
      compose(xcounts, m, x, y + 1, remaining - v, acc);
    }
  }

  void leaf(const Eigen::MatrixXi& m, double& acc) const {
    // y^n must be delta-typical for q.
    for (int y = 0; y < ky_; ++y) {
      double target = n_ * q_[y];
      if (std::abs(m.row(y).sum() - target) > delta_ * target) return;
    }
    // x^n must be conditionally typical given y^n.
    if (!is_conditionally_typical_counts(m, backward_, delta_)) return;
    double lp = 0.0;
    for (int y = 0; y < ky_; ++y)
      for (int x = 0; x < kx_; ++x) {
        if (m(y, x) > 0 && q_[y] * backward_(y, x) <= 0) return;
        lp += m(y, x) * log2qp_(y, x);
      }
    // Count of y^n arrangements: per x-symbol multinomial over its positions.
    for (int x = 0; x < kx_; ++x) lp += log2_multinomial(m.col(x));
    acc += std::exp2(lp);
  }

  const Distribution& q_;
  const Channel& backward_;
  int n_;
  double delta_;
  int ky_, kx_;
  RMat log2qp_;
};

}  // namespace

CoveringCode covering_from_table(const Distribution& q, const Channel& backward,
                                 SeqTable table, double delta, double eps) {
  if (backward.num_inputs() != q.size())
    throw ValidationError("covering: backward channel must condition on q's alphabet");
  if (!(delta > 0) || !(eps > 0) || eps >= 1)
    throw ValidationError("covering: need delta > 0 and eps in (0,1)");
  const int n = static_cast<int>(table.cols());
  const std::int64_t M = table.rows();
  if (n < 1 || M < 1) throw ValidationError("covering: empty table");
  const int kx = backward.num_outputs();
  const int ky = q.size();
  for (Eigen::Index i = 0; i < table.rows(); ++i)
    for (Eigen::Index j = 0; j < table.cols(); ++j)
      if (table(i, j) < 0 || table(i, j) >= ky)
        throw ValidationError("covering: symbol outside alphabet");

  std::uint64_t num_x =
      checked_pow(kx, n, kEnumerationGuard, "covering input enumeration");
  if (num_x * static_cast<std::uint64_t>(M) > (std::uint64_t{1} << 23))
    throw GuardExceeded("covering: encoder storage exceeds guard");

  Distribution p = backward.push(q);
  double c_p = typicality_constants(p).c;
  double c_cond = typicality_constants(q, backward).c_prime;
  double h_p = shannon_entropy(p);
  double h_cond = 0.0;
  for (int y = 0; y < ky; ++y)
    for (int x = 0; x < kx; ++x)
      if (backward(y, x) > 0)
        h_cond -= q[y] * backward(y, x) * std::log2(backward(y, x));

  CoveringCode code{.q = q,
                    .backward = backward,
                    .p = p,
                    .n = n,
                    .table = std::move(table),
                    .encoder = {},
                    .delta = delta,
                    .eps = eps};
  code.log2_K = n * (h_p + 3.0 * c_p * delta);
  double eff = 2.0 * delta + delta * delta;
  code.log2_k = n * (h_cond - c_cond * eff);
  code.eta = std::exp2(code.log2_K - code.log2_k) / static_cast<double>(M);

  // Which table rows are delta-typical (the gate of the conditional sets).
  std::vector<char> row_typical(M);
  for (std::int64_t i = 0; i < M; ++i) {
    Seq yn = code.table.row(i).transpose();
    row_typical[i] = is_typical(yn, q, delta) ? 1 : 0;
  }

  WeightEvaluator weights(q, backward, n, delta);
  RMat log2bw(ky, kx);
  for (int y = 0; y < ky; ++y)
    for (int x = 0; x < kx; ++x)
      log2bw(y, x) = backward(y, x) > 0 ? std::log2(backward(y, x)) : 0.0;
  RVec log2p(kx);
  for (int x = 0; x < kx; ++x)
    log2p[x] = p[x] > 0 ? std::log2(p[x]) : 0.0;

  code.encoder = RMat::Zero(static_cast<Eigen::Index>(num_x), M);
  const double log2_thresh = std::log2(eps) - code.log2_K;
  double wtilde_total = 0.0;
  bool iota = true;
  double max_subnorm = 0.0;

  Eigen::Index xi = 0;
  for_each_sequence(kx, n, [&](const Seq& xn, const Eigen::VectorXi& counts) {
    const Eigen::Index row = xi++;
    bool p_support = true;
    for (int x = 0; x < kx; ++x)
      if (counts[x] > 0 && p[x] <= 0) p_support = false;
    if (!p_support) {
      code.encoder(row, 0) = 1.0;  // unreachable under p^n
      return;
    }
    bool in_T = is_typical_counts(counts, n, p, 3.0 * delta);
    double log2w = -std::numeric_limits<double>::infinity();
    if (in_T) log2w = weights.log2_weight(counts);
    bool trimmed_in = in_T && log2w >= log2_thresh;
    double wtilde = trimmed_in ? std::exp2(log2w) : 0.0;
    wtilde_total += wtilde;

    double sub_total = 0.0;
    if (trimmed_in) {
      double log2pn = 0.0;
      for (int x = 0; x < kx; ++x) log2pn += counts[x] * log2p[x];
      double tilde_sum = 0.0;  // (1/M) sum_i Ptilde(x|D(i))
      for (std::int64_t i = 0; i < M; ++i) {
        if (!row_typical[i]) continue;
        // conditional typicality of x^n given row i
        double log2c = 0.0;
        bool ok = true;
        Eigen::MatrixXi jc = Eigen::MatrixXi::Zero(ky, kx);
        for (int j = 0; j < n; ++j) ++jc(code.table(i, j), xn[j]);
        ok = is_conditionally_typical_counts(jc, backward, delta);
        if (ok)
          for (int y = 0; y < ky && ok; ++y)
            for (int x = 0; x < kx; ++x) {
              if (jc(y, x) > 0 && backward(y, x) <= 0) {
                ok = false;
                break;
              }
              log2c += jc(y, x) * log2bw(y, x);
            }
        if (!ok) continue;
        double ptilde = std::exp2(log2c);
        tilde_sum += ptilde / M;
        code.encoder(row, i) =
            std::exp2(log2c - log2pn) / ((1.0 + eps) * static_cast<double>(M));
        sub_total += code.encoder(row, i);
      }
      if (tilde_sum < (1.0 - eps) * wtilde || tilde_sum > (1.0 + eps) * wtilde)
        iota = false;
    }
    max_subnorm = std::max(max_subnorm, sub_total);
    if (sub_total <= 1.0) {
      code.encoder(row, 0) += 1.0 - sub_total;  // residual fill-up
    } else {
      code.encoder.row(row) /= sub_total;  // only reachable when iota fails
    }
  });

  code.trim_loss = 1.0 - wtilde_total;
  code.iota_holds = iota;
  code.max_subnorm = max_subnorm;
  return code;
}

CoveringCode covering_encoder(const Distribution& q, const Channel& backward,
                              int n, std::int64_t M, double delta, double eps,
                              Rng& rng) {
  if (n < 1 || M < 1) throw ValidationError("covering: need n >= 1, M >= 1");
  if (static_cast<std::uint64_t>(M) > kEnumerationGuard)
    throw GuardExceeded("covering: table size exceeds guard");
  SeqTable table(M, n);
  for (std::int64_t i = 0; i < M; ++i)
    table.row(i) = q.sample_sequence(n, rng).transpose();
  return covering_from_table(q, backward, std::move(table), delta, eps);
}

DeviationReport covering_deviation(const CoveringCode& code) {
  const std::int64_t M = code.size();
  const std::uint64_t num_x = static_cast<std::uint64_t>(code.num_inputs());
  if (num_x * static_cast<std::uint64_t>(M) > kAccumulationGuard)
    throw GuardExceeded("covering deviation: exact accumulation exceeds guard");
  const int kx = code.backward.num_outputs();
  double total = 0.0;
  Eigen::Index xi = 0;
  for_each_sequence(kx, code.n, [&](const Seq& xn, const Eigen::VectorXi&) {
    const Eigen::Index row = xi++;
    double pn = std::exp2(log2_prob(code.p, xn));
    for (std::int64_t i = 0; i < M; ++i) {
      Seq yn = code.table.row(i).transpose();
      double cond = std::exp2(log2_cond_prob(code.backward, yn, xn));
      total += std::abs(cond / M - code.encoder(row, i) * pn);
    }
  });
  return DeviationReport{total, true, 0.0};
}

DeviationReport covering_deviation_mc(const CoveringCode& code,
                                      int samples_per_index, Rng& rng) {
  if (samples_per_index < 2)
    throw ValidationError("covering deviation mc: need >= 2 samples per index");
  const std::int64_t M = code.size();
  const int kx = code.backward.num_outputs();
  // Encoder rows follow the lexicographic sequence order.
  std::vector<std::int64_t> pow(code.n);
  std::int64_t acc = 1;
  for (int j = code.n - 1; j >= 0; --j) {
    pow[j] = acc;
    acc *= kx;
  }
  double mean_total = 0.0;
  double var_total = 0.0;
  for (std::int64_t i = 0; i < M; ++i) {
    Seq yn = code.table.row(i).transpose();
    double s1 = 0.0, s2 = 0.0;
    for (int t = 0; t < samples_per_index; ++t) {
      // proposal: mix of P^n(.|D(i)) and p^n with equal weight
      Seq xn(code.n);
      if (rng.uniform01() < 0.5) {
        for (int j = 0; j < code.n; ++j)
          xn[j] = rng.categorical(code.backward.matrix().row(yn[j]).transpose());
      } else {
        xn = code.p.sample_sequence(code.n, rng);
      }
      double cond = std::exp2(log2_cond_prob(code.backward, yn, xn));
      double pn = std::exp2(log2_prob(code.p, xn));
      double mix = 0.5 * (cond + pn);
      if (mix <= 0) continue;
      std::int64_t row = 0;
      for (int j = 0; j < code.n; ++j) row += pow[j] * xn[j];
      double f = std::abs(cond / M - code.encoder(row, i) * pn) / mix;
      s1 += f;
      s2 += f * f;
    }
    double mean = s1 / samples_per_index;
    double var = (s2 / samples_per_index - mean * mean) /
                 std::max(1, samples_per_index - 1);
    mean_total += mean;
    var_total += std::max(0.0, var);
  }
  return DeviationReport{mean_total, false, std::sqrt(var_total)};
}

double covering_tail_bound(const CoveringCode& code, double kappa0) {
  double log_ratio = (code.log2_k - code.log2_K) * std::numbers::ln2;
  return 2.0 * std::exp2(code.log2_K) *
         std::exp(-kappa0 * static_cast<double>(code.size()) *
                  std::pow(code.eps, 3) * std::exp(log_ratio));
}

}  // namespace chansim
