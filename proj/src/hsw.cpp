#include "chansim/hsw.hpp"

#include <cmath>

#include "chansim/linalg.hpp"
#include "chansim/typicality.hpp"

namespace chansim {

namespace {

Mat tensor_chain(const std::vector<Mat>& states, const Seq& word) {
  Mat out = Mat::Ones(1, 1);
  for (Eigen::Index j = 0; j < word.size(); ++j) out = kron(out, states[word[j]]);
  return out;
}

// Projector onto the span of n-fold eigenvector products whose eigenvalue
// product lies in the entropy window [2^{-n(H+delta)}, 2^{-n(H-delta)}].
Mat entropy_typical_projector(const Mat& avg, int n, double delta,
                              Eigen::Index dim_total) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(avg));
  const RVec& vals = es.eigenvalues();
  const Mat& vecs = es.eigenvectors();
  const int d = static_cast<int>(vals.size());
  double h = 0.0;
  RVec log2v = RVec::Zero(d);
  for (int k = 0; k < d; ++k) {
    if (vals[k] > 1e-15) {
      log2v[k] = std::log2(vals[k]);
      h -= vals[k] * log2v[k];
    } else {
      log2v[k] = -std::numeric_limits<double>::infinity();
    }
  }
  Mat proj = Mat::Zero(dim_total, dim_total);
  for_each_sequence(d, n, [&](const Seq& word, const Eigen::VectorXi&) {
    double lp = 0.0;
    for (int j = 0; j < n; ++j) lp += log2v[word[j]];
    if (lp < -n * (h + delta) || lp > -n * (h - delta)) return;
    CVec v = CVec::Ones(1);
    for (int j = 0; j < n; ++j) {
      CVec next(v.size() * d);
      for (Eigen::Index a = 0; a < v.size(); ++a)
        next.segment(a * d, d) = v[a] * vecs.col(word[j]);
      v = std::move(next);
    }
    proj += v * v.adjoint();
  });
  return proj;
}

}  // namespace

Mat HswCode::codeword_state(int s) const {
  return tensor_chain(states, codewords.row(s).transpose());
}

HswCode hsw_from_table(const Distribution& q, const std::vector<Mat>& states,
                       SeqTable codewords, const HswOptions& opts) {
  if (states.empty()) throw ValidationError("hsw: no signal states");
  if (static_cast<int>(states.size()) != q.size())
    throw ValidationError("hsw: state count must match alphabet");
  const int d_single = static_cast<int>(states.front().rows());
  for (const Mat& st : states)
    if (st.rows() != d_single || st.cols() != d_single)
      throw ValidationError("hsw: states must share a dimension");
  const int n = static_cast<int>(codewords.cols());
  const Eigen::Index num_s = codewords.rows();
  if (n < 1 || num_s < 1) throw ValidationError("hsw: empty codebook");
  for (Eigen::Index i = 0; i < num_s; ++i)
    for (int j = 0; j < n; ++j)
      if (codewords(i, j) < 0 || codewords(i, j) >= q.size())
        throw ValidationError("hsw: symbol outside alphabet");

  std::uint64_t dim =
      checked_pow(d_single, n, kMatrixDimGuard, "hsw block dimension");
  if (static_cast<std::uint64_t>(num_s) * dim * dim > (std::uint64_t{1} << 25))
    throw GuardExceeded("hsw: measurement storage exceeds guard");

  HswCode code{.q = q,
               .states = states,
               .n = n,
               .codewords = std::move(codewords),
               .povm = {},
               .fail = {},
               .options = opts};

  const Eigen::Index D = static_cast<Eigen::Index>(dim);
  Mat proj;
  if (opts.typical_projection) {
    Mat avg = Mat::Zero(d_single, d_single);
    for (int y = 0; y < q.size(); ++y) avg += q[y] * states[y];
    proj = entropy_typical_projector(avg, n, opts.projection_delta, D);
  }

  std::vector<Mat> sig(num_s);
  Mat sum = Mat::Zero(D, D);
  for (Eigen::Index s = 0; s < num_s; ++s) {
    sig[s] = tensor_chain(states, code.codewords.row(s).transpose());
    if (opts.typical_projection) sig[s] = proj * sig[s] * proj;
    sum += sig[s];
  }
  Mat root = pinv_sqrt(sum);
  code.povm.resize(num_s);
  Mat acc = Mat::Zero(D, D);
  for (Eigen::Index s = 0; s < num_s; ++s) {
    code.povm[s] = hermitize(root * sig[s] * root);
    acc += code.povm[s];
  }
  code.fail = hermitize(Mat::Identity(D, D) - acc);
  return code;
}

HswCode build_hsw(const Ensemble& e, int n, double rate, Rng& rng,
                  const HswOptions& opts) {
  if (n < 1) throw ValidationError("hsw: n must be >= 1");
  if (rate < 0) throw ValidationError("hsw: rate must be >= 0");
  int bits = static_cast<int>(std::ceil(n * rate - 1e-9));
  if (bits > 24) throw GuardExceeded("hsw: message count exceeds guard");
  Eigen::Index num_s = Eigen::Index{1} << bits;
  SeqTable words(num_s, n);
  for (Eigen::Index s = 0; s < num_s; ++s)
    words.row(s) = e.prior.sample_sequence(n, rng).transpose();
  std::vector<Mat> states;
  states.reserve(e.size());
  for (const auto& st : e.states) states.push_back(st.matrix());
  return hsw_from_table(e.prior, states, std::move(words), opts);
}

RVec decode_distribution(const HswCode& code, int s) {
  if (s < 0 || s >= code.num_messages())
    throw ValidationError("decode_distribution: message out of range");
  Mat rho = code.codeword_state(s);
  RVec out(code.num_messages() + 1);
  for (int sp = 0; sp < code.num_messages(); ++sp)
    out[sp] = std::max(0.0, (code.povm[sp].array() * rho.array().conjugate())
                                .sum()
                                .real());
  out[code.num_messages()] =
      std::max(0.0, (code.fail.array() * rho.array().conjugate()).sum().real());
  return out;
}

HswErrorSummary average_error(const HswCode& code) {
  HswErrorSummary sum;
  const int ns = code.num_messages();
  for (int s = 0; s < ns; ++s) {
    RVec pi = decode_distribution(code, s);
    double err = 0.0;
    for (int sp = 0; sp < ns; ++sp)
      err += std::abs(pi[sp] - (sp == s ? 1.0 : 0.0));
    sum.mean_error += err / ns;
    sum.max_error = std::max(sum.max_error, err);
    sum.mean_fail += pi[ns] / ns;
  }
  return sum;
}

MeasureOutcome measure(const HswCode& code, const Mat& state, Rng& rng) {
  if (state.rows() != code.dim() || state.cols() != code.dim())
    throw ValidationError("measure: state dimension mismatch");
  const int ns = code.num_messages();
  RVec probs(ns + 1);
  for (int s = 0; s < ns; ++s)
    probs[s] = std::max(
        0.0, (code.povm[s].array() * state.array().conjugate()).sum().real());
  probs[ns] =
      std::max(0.0, (code.fail.array() * state.array().conjugate()).sum().real());
  int pick = rng.categorical(probs);
  const Mat& element = pick == ns ? code.fail : code.povm[pick];
  double p = probs[pick];
  MeasureOutcome out;
  if (p < 1e-15) {
    out.outcome = -1;
    out.post = state;
    out.disturbance = 0.0;
    return out;
  }
  Mat root = hermitian_sqrt(element);
  out.outcome = pick == ns ? -1 : pick;
  out.post = root * state * root / p;
  out.disturbance = trace_distance(state, out.post);
  return out;
}

}  // namespace chansim
