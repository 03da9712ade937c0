#include "chansim/protocol.hpp"

#include <cmath>
#include <limits>

#include "chansim/linalg.hpp"
#include "chansim/typicality.hpp"

namespace chansim {

namespace {

// MAC budget for the exact measurement-statistics sweep.
constexpr std::uint64_t kTraceOpsGuard = std::uint64_t{1} << 33;

int rate_bits(double nr) {
  if (nr <= 1e-9) return 0;
  double b = std::ceil(nr - 1e-9);
  if (b > 24) throw GuardExceeded("simulation code: index width above 24 bits");
  return static_cast<int>(b);
}

Mat tensor_chain(const std::vector<Mat>& states, const Seq& word) {
  Mat out = states[word[0]];
  for (int j = 1; j < word.size(); ++j) out = kron(out, states[word[j]]).eval();
  return out;
}

// Outcome masses of the code's measurement on an arbitrary state, completion
// element last; clamped at zero.
RVec outcome_probs(const HswCode& meas, const Mat& rho) {
  const int num = meas.num_messages();
  RVec probs(num + 1);
  for (int s = 0; s <= num; ++s) {
    const Mat& lam = s < num ? meas.povm[s] : meas.fail;
    probs[s] = std::max(0.0, (lam.array() * rho.array().conjugate()).sum().real());
  }
  return probs;
}

double prob_of_word(const Channel& w, const Seq& yn, const Seq& xn) {
  double v = 1.0;
  for (int j = 0; j < yn.size(); ++j) v *= w(xn[j], yn[j]);
  return v;
}

std::uint64_t pair_key(std::uint64_t yt, std::uint64_t yh, std::uint64_t num_y) {
  return yt * num_y + yh;
}

// Joint law of (y_tilde, y_hat) given x^n for each listed input index, by one
// sweep over the (l, m) slices: each slice measurement is built once and its
// statistics evaluated on every listed source state.
std::vector<std::unordered_map<std::uint64_t, double>> conditional_joint(
    const SimulationCode& code, const std::vector<std::int64_t>& xs) {
  const int n = code.n;
  const int num_s = code.num_s;
  const std::uint64_t dim =
      checked_pow(code.source.dim(), n, kMatrixDimGuard, "simulation block dim");
  const std::uint64_t num_y = checked_pow(
      code.channel.num_outputs(), n, std::uint64_t{1} << 31, "output index");
  const std::uint64_t slices =
      static_cast<std::uint64_t>(code.num_l) * code.num_m;
  const std::uint64_t entries = static_cast<std::uint64_t>(xs.size()) * slices *
                                num_s * num_s;
  if (entries > kAccumulationGuard)
    throw GuardExceeded("simulated channel: joint accumulation exceeds guard");
  if (slices * xs.size() * (num_s + 1) * dim * dim > kTraceOpsGuard)
    throw GuardExceeded("simulated channel: measurement sweep exceeds guard");

  std::vector<Mat> rho;  // source block states for the listed inputs
  rho.reserve(xs.size());
  for (std::int64_t x : xs) {
    Seq xn = index_to_seq(x, code.source.size(), n);
    rho.push_back(code.source_state(xn));
  }
  // word_index[row] = lexicographic index of the codebook row.
  std::vector<std::uint64_t> word_index(code.codebook.rows());
  for (int row = 0; row < code.codebook.rows(); ++row)
    word_index[row] = static_cast<std::uint64_t>(
        seq_to_index(code.codebook.row(row).transpose(), code.channel.num_outputs()));

  const double u_l = 1.0 / code.num_l;
  std::vector<std::unordered_map<std::uint64_t, double>> joint(xs.size());
  for (int l = 0; l < code.num_l; ++l) {
    const RMat& enc = code.encoders[l].encoder;
    for (int m = 0; m < code.num_m; ++m) {
      HswCode meas = code.slice_measurement(l, m);
      for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        RVec probs = outcome_probs(meas, rho[xi]);
        probs[0] += probs[num_s];  // decode failure falls back to payload 0
        for (int s = 0; s < num_s; ++s) {
          double e = enc(xs[xi], m * num_s + s);
          if (e <= 0.0) continue;
          std::uint64_t yt = word_index[code.row_of(l, m, s)];
          for (int sp = 0; sp < num_s; ++sp) {
            if (probs[sp] <= 0.0) continue;
            std::uint64_t yh = word_index[code.row_of(l, m, sp)];
            joint[xi][pair_key(yt, yh, num_y)] += u_l * e * probs[sp];
          }
        }
      }
    }
  }
  return joint;
}

// L1 distance between the conditional joint law of (y_tilde, y_hat) and the
// ideal W^n(y|x) delta(y_tilde, y_hat).
double conditional_l1(const SimulationCode& code,
                      const std::unordered_map<std::uint64_t, double>& joint,
                      const Seq& xn, std::uint64_t num_y) {
  const int ky = code.channel.num_outputs();
  double dist = 0.0;
  double diag_target = 0.0;  // ideal mass landing on keys the code can reach
  for (const auto& [key, v] : joint) {
    std::uint64_t yt = key / num_y, yh = key % num_y;
    double target = 0.0;
    if (yt == yh)
      target = prob_of_word(code.channel,
                            index_to_seq(static_cast<std::int64_t>(yt), ky, code.n),
                            xn);
    dist += std::abs(v - target);
    diag_target += target;
  }
  return dist + (1.0 - diag_target);
}

}  // namespace

Rates default_rates(const ExtendedState& ext, double delta) {
  if (!(delta > 0.0)) throw ValidationError("default_rates: delta must be positive");
  double ixy = mutual_information_classical(ext.joint);
  double iyb = holevo_information(ext.output_ensemble());
  double hyx = 0.0;
  for (int x = 0; x < ext.channel.num_inputs(); ++x)
    hyx += ext.source.prior[x] * shannon_entropy(ext.channel.row(x));
  double k = typicality_constants(ext.output).c;
  Rates rates;
  rates.r = std::max(0.0, ixy - iyb + 4.0 * k * delta);
  rates.c = std::max(0.0, hyx - k * delta);
  rates.s = std::max(0.0, iyb - k * delta);
  return rates;
}

Mat SimulationCode::source_state(const Seq& xn) const {
  std::vector<Mat> states(source.size());
  for (int x = 0; x < source.size(); ++x) states[x] = source.states[x].matrix();
  return tensor_chain(states, xn);
}

HswCode SimulationCode::slice_measurement(int l, int m) const {
  SeqTable slice(num_s, n);
  for (int s = 0; s < num_s; ++s) slice.row(s) = codebook.row(row_of(l, m, s));
  return hsw_from_table(ext.output, ext.output_states, slice, options.hsw);
}

SimulationCode build_simulation_code(const Ensemble& e, const Channel& w, int n,
                                     const Rates& rates, Rng& rng,
                                     const SimulationOptions& opts) {
  if (n < 1) throw ValidationError("simulation code: n must be positive");
  if (e.size() != w.num_inputs())
    throw ValidationError("simulation code: ensemble size != channel inputs");
  SimulationCode code{.source = e,
                      .channel = w,
                      .ext = apply_channel(e, w),
                      .n = n,
                      .rates = rates,
                      .options = opts};
  code.num_l = 1 << rate_bits(n * rates.c);
  code.num_m = 1 << rate_bits(n * rates.r);
  code.num_s = 1 << rate_bits(n * rates.s);
  std::uint64_t rows = static_cast<std::uint64_t>(code.num_l) * code.num_m *
                       static_cast<std::uint64_t>(code.num_s);
  if (rows > kEnumerationGuard)
    throw GuardExceeded("simulation code: codebook exceeds guard");
  checked_pow(e.dim(), n, kMatrixDimGuard, "simulation block dim");

  code.codebook.resize(static_cast<Eigen::Index>(rows), n);
  for (Eigen::Index row = 0; row < code.codebook.rows(); ++row)
    code.codebook.row(row) = code.ext.output.sample_sequence(n, rng).transpose();

  Channel backward(code.ext.backward);
  const int block = code.num_m * code.num_s;
  code.encoders.reserve(code.num_l);
  for (int l = 0; l < code.num_l; ++l) {
    SeqTable slice = code.codebook.middleRows(
        static_cast<Eigen::Index>(l) * block, block);
    code.encoders.push_back(covering_from_table(code.ext.output, backward,
                                                std::move(slice), opts.delta,
                                                opts.eps));
  }
  return code;
}

SimulationOutcome simulate_once(const SimulationCode& code, const Seq& xn,
                                Rng& rng, bool keep_post, int fixed_l) {
  if (xn.size() != code.n)
    throw ValidationError("simulate: sequence length != block length");
  for (int j = 0; j < xn.size(); ++j)
    if (xn[j] < 0 || xn[j] >= code.source.size())
      throw ValidationError("simulate: symbol out of range");
  if (fixed_l >= code.num_l)
    throw ValidationError("simulate: fixed l out of range");

  SimulationOutcome out;
  out.xn = xn;
  out.l = fixed_l >= 0 ? fixed_l : static_cast<int>(rng.below(code.num_l));
  std::int64_t x_idx = seq_to_index(xn, code.source.size());
  RVec row = code.encoders[out.l].encoder.row(x_idx).transpose();
  if (!(row.sum() > 0.0))
    throw ValidationError("simulate: degenerate encoder row");
  int ms = rng.categorical(row);
  out.m = ms / code.num_s;
  out.s = ms % code.num_s;
  out.y_tilde = code.word(out.l, out.m, out.s);

  HswCode meas = code.slice_measurement(out.l, out.m);
  MeasureOutcome mo = measure(meas, code.source_state(xn), rng);
  out.decode_failed = mo.outcome < 0;
  out.s_prime = out.decode_failed ? 0 : mo.outcome;
  out.y_hat = code.word(out.l, out.m, out.s_prime);
  out.disturbance = mo.disturbance;
  if (keep_post) out.post = std::move(mo.post);
  return out;
}

SimulationOutcome simulate_once_sampled(const SimulationCode& code, Rng& rng,
                                        bool keep_post) {
  Seq xn = code.source.prior.sample_sequence(code.n, rng);
  return simulate_once(code, xn, rng, keep_post);
}

ExactChannel exact_simulated_channel(const SimulationCode& code) {
  const int kx = code.source.size();
  const int ky = code.channel.num_outputs();
  const std::uint64_t num_x =
      checked_pow(kx, code.n, kEnumerationGuard, "input enumeration");
  const std::uint64_t num_y =
      checked_pow(ky, code.n, std::uint64_t{1} << 31, "output index");
  if (num_x * num_y > kEnumerationGuard)
    throw GuardExceeded("simulated channel: transition matrix exceeds guard");
  const std::uint64_t rows = static_cast<std::uint64_t>(code.codebook.rows());
  if (num_x > kAccumulationGuard / rows / num_y)
    throw GuardExceeded("simulated channel: accumulation exceeds guard");

  ExactChannel exact;
  exact.num_y = num_y;
  exact.w_tilde = RMat::Zero(static_cast<Eigen::Index>(num_x),
                             static_cast<Eigen::Index>(num_y));
  std::vector<std::uint64_t> word_index(code.codebook.rows());
  for (int row = 0; row < code.codebook.rows(); ++row)
    word_index[row] = static_cast<std::uint64_t>(
        seq_to_index(code.codebook.row(row).transpose(), ky));
  const double u_l = 1.0 / code.num_l;
  for (int l = 0; l < code.num_l; ++l) {
    const RMat& enc = code.encoders[l].encoder;
    for (std::uint64_t x = 0; x < num_x; ++x)
      for (int ms = 0; ms < enc.cols(); ++ms) {
        double e = enc(static_cast<Eigen::Index>(x), ms);
        if (e <= 0.0) continue;
        int row = l * code.num_m * code.num_s + ms;
        exact.w_tilde(static_cast<Eigen::Index>(x),
                      static_cast<Eigen::Index>(word_index[row])) += u_l * e;
      }
  }

  std::vector<std::int64_t> xs(num_x);
  for (std::uint64_t x = 0; x < num_x; ++x) xs[x] = static_cast<std::int64_t>(x);
  exact.joint = conditional_joint(code, xs);
  return exact;
}

ErrorReport estimate_simulation_error(const SimulationCode& code, int trials,
                                      Rng& rng) {
  if (trials < 1) throw ValidationError("estimate: trials must be positive");
  ErrorReport rep;
  rep.trials = trials;

  const int kx = code.source.size();
  const std::uint64_t num_y = checked_pow(
      code.channel.num_outputs(), code.n, std::uint64_t{1} << 31, "output index");

  bool exact_ok = true;
  std::uint64_t num_x = 0;
  try {
    num_x = checked_pow(kx, code.n, kEnumerationGuard, "input enumeration");
    std::vector<std::int64_t> xs(num_x);
    for (std::uint64_t x = 0; x < num_x; ++x)
      xs[x] = static_cast<std::int64_t>(x);
    auto joint = conditional_joint(code, xs);
    double l1 = 0.0;
    for (std::uint64_t x = 0; x < num_x; ++x) {
      Seq xn = index_to_seq(static_cast<std::int64_t>(x), kx, code.n);
      double px = std::exp2(log2_prob(code.source.prior, xn));
      if (px <= 0.0) continue;
      l1 += px * conditional_l1(code, joint[x], xn, num_y);
    }
    rep.classical_l1 = l1;
    rep.classical_exact = true;
  } catch (const GuardExceeded&) {
    exact_ok = false;
  }

  if (!exact_ok) {
    // Monte Carlo over x^n of the exact conditional deviation.
    std::vector<std::int64_t> xs(trials);
    std::vector<Seq> seqs(trials);
    for (int t = 0; t < trials; ++t) {
      seqs[t] = code.source.prior.sample_sequence(code.n, rng);
      xs[t] = seq_to_index(seqs[t], kx);
    }
    auto joint = conditional_joint(code, xs);
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
      double v = conditional_l1(code, joint[t], seqs[t], num_y);
      sum += v;
      sum2 += v * v;
    }
    rep.classical_l1 = sum / trials;
    rep.classical_se = trials > 1 ? std::sqrt(std::max(
                                        0.0, (sum2 - sum * sum / trials) /
                                                 (trials - 1.0) / trials))
                                  : 0.0;
  }

  // Operator-level deviation at short blocks: accumulate the receiver's
  // unnormalized post-measurement blocks per (x, y_tilde, y_hat) and take the
  // trace norm against the undisturbed target.
  const std::uint64_t slices = static_cast<std::uint64_t>(code.num_l) * code.num_m;
  std::uint64_t block_dim = 1;
  for (int j = 0; j < code.n; ++j) block_dim *= code.source.dim();
  if (code.n <= 3 && num_x > 0 && num_x <= 512 && slices * code.num_s <= 4096 &&
      block_dim <= 64) {
    const double u_l = 1.0 / code.num_l;
    std::vector<std::uint64_t> word_index(code.codebook.rows());
    for (int row = 0; row < code.codebook.rows(); ++row)
      word_index[row] = static_cast<std::uint64_t>(seq_to_index(
          code.codebook.row(row).transpose(), code.channel.num_outputs()));
    double l1 = 0.0;
    for (std::uint64_t x = 0; x < num_x; ++x) {
      Seq xn = index_to_seq(static_cast<std::int64_t>(x), kx, code.n);
      double px = std::exp2(log2_prob(code.source.prior, xn));
      if (px <= 0.0) continue;
      Mat rho = code.source_state(xn);
      std::int64_t x_idx = static_cast<std::int64_t>(x);
      std::unordered_map<std::uint64_t, Mat> blocks;
      for (int l = 0; l < code.num_l; ++l) {
        const RMat& enc = code.encoders[l].encoder;
        for (int m = 0; m < code.num_m; ++m) {
          HswCode meas = code.slice_measurement(l, m);
          std::vector<Mat> post(code.num_s);  // unnormalized, fail into 0
          for (int sp = 0; sp <= code.num_s; ++sp) {
            const Mat& lam = sp < code.num_s ? meas.povm[sp] : meas.fail;
            Mat k = hermitian_sqrt(lam);
            Mat p = k * rho * k;
            int target = sp < code.num_s ? sp : 0;
            if (post[target].size() == 0)
              post[target] = std::move(p);
            else
              post[target] += p;
          }
          for (int s = 0; s < code.num_s; ++s) {
            double e = enc(x_idx, m * code.num_s + s);
            if (e <= 0.0) continue;
            std::uint64_t yt = word_index[code.row_of(l, m, s)];
            for (int sp = 0; sp < code.num_s; ++sp) {
              std::uint64_t yh = word_index[code.row_of(l, m, sp)];
              std::uint64_t key = pair_key(yt, yh, num_y);
              Mat add = (u_l * e) * post[sp];
              auto it = blocks.find(key);
              if (it == blocks.end())
                blocks.emplace(key, std::move(add));
              else
                it->second += add;
            }
          }
        }
      }
      double diag_target = 0.0;
      for (const auto& [key, block] : blocks) {
        std::uint64_t yt = key / num_y, yh = key % num_y;
        Mat diff = block;
        if (yt == yh) {
          double target = prob_of_word(
              code.channel,
              index_to_seq(static_cast<std::int64_t>(yt),
                           code.channel.num_outputs(), code.n),
              xn);
          diff -= target * rho;
          diag_target += target;
        }
        l1 += px * trace_norm_hermitian(diff);
      }
      l1 += px * (1.0 - diag_target);  // ideal blocks the code never reaches
    }
    rep.quantum_l1 = l1;
    rep.has_quantum = true;
  }

  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    SimulationOutcome out = simulate_once_sampled(code, rng);
    sum += out.disturbance;
    sum2 += out.disturbance * out.disturbance;
  }
  rep.mean_disturbance = sum / trials;
  rep.disturbance_se =
      trials > 1
          ? std::sqrt(std::max(0.0, (sum2 - sum * sum / trials) /
                                        (trials - 1.0) / trials))
          : 0.0;
  return rep;
}

DerandomizeResult derandomize(const Ensemble& e, const Channel& w, int n,
                              const Rates& rates, int candidates,
                              std::uint64_t seed, int eval_trials,
                              const SimulationOptions& opts) {
  if (candidates < 1)
    throw ValidationError("derandomize: need at least one candidate");
  auto evaluate = [&](int k) {
    Rng build = derive_rng(seed, "protocol-build", static_cast<std::uint64_t>(k));
    SimulationCode code = build_simulation_code(e, w, n, rates, build, opts);
    // Identical evaluation stream for every candidate: scores are paired.
    Rng eval = derive_rng(seed, "protocol-eval", 0);
    ErrorReport rep = estimate_simulation_error(code, eval_trials, eval);
    return std::make_pair(std::move(code), rep);
  };
  auto [first_code, first_rep] = evaluate(0);
  DerandomizeResult result{.best = std::move(first_code),
                           .best_index = 0,
                           .best_score = first_rep.classical_l1 + first_rep.mean_disturbance,
                           .best_report = first_rep,
                           .scores = {}};
  result.scores.reserve(static_cast<std::size_t>(candidates));
  result.scores.push_back(result.best_score);
  for (int k = 1; k < candidates; ++k) {
    auto [code, rep] = evaluate(k);
    double score = rep.classical_l1 + rep.mean_disturbance;
    result.scores.push_back(score);
    if (score < result.best_score) {
      result.best = std::move(code);
      result.best_index = k;
      result.best_score = score;
      result.best_report = rep;
    }
  }
  return result;
}

NaiveReport naive_baseline(const Ensemble& e, const Channel& w, int n,
                           double delta) {
  ExtendedState ext = apply_channel(e, w);
  SetSummary ts = typical_set_summary(ext.output, n, delta);
  NaiveReport rep;
  rep.rate = shannon_entropy(ext.output);
  rep.achieved_rate = std::log2(static_cast<double>(ts.cardinality) + 1.0) / n;
  // The sender ships y^n verbatim when typical and a fixed filler sequence
  // otherwise, so exactly the atypical mass is displaced.
  rep.classical_l1 = 2.0 * ts.epsilon;
  rep.mean_disturbance = 0.0;
  return rep;
}

std::int64_t seq_to_index(const Seq& seq, int alphabet) {
  std::int64_t idx = 0;
  for (int j = 0; j < seq.size(); ++j) idx = idx * alphabet + seq[j];
  return idx;
}

Seq index_to_seq(std::int64_t index, int alphabet, int n) {
  Seq seq(n);
  for (int j = n - 1; j >= 0; --j) {
    seq[j] = static_cast<int>(index % alphabet);
    index /= alphabet;
  }
  return seq;
}

}  // namespace chansim
