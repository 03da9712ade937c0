#include "chansim/rates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "chansim/linalg.hpp"
#include "chansim/qinfo.hpp"

namespace chansim {

namespace {

constexpr double kSlackTol = 1e-9;

// Euclidean projection onto the probability simplex.
RVec project_simplex(const RVec& v) {
  const int k = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + k);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double acc = 0.0, theta = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += u[i];
    double t = (acc - 1.0) / (i + 1);
    if (u[i] - t > 0.0)
      theta = t;
    else
      break;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

RMat random_channel(int kx, int ky, Rng& rng) {
  RMat w(kx, ky);
  for (int x = 0; x < kx; ++x) {
    for (int y = 0; y < ky; ++y)
      w(x, y) = -std::log1p(-rng.uniform01());  // unit exponentials
    w.row(x) /= w.row(x).sum();
  }
  return w;
}

// x -> y = x embedding; ky > kx always holds here.
RMat identity_embedding(int kx, int ky) {
  RMat w = RMat::Zero(kx, ky);
  for (int x = 0; x < kx; ++x) w(x, x) = 1.0;
  return w;
}

RMat uniform_rows(int kx, int ky) {
  return RMat::Constant(kx, ky, 1.0 / ky);
}

// Hill climb over row-simplex channels; score is maximized.
RMat hill_climb(RMat w, const std::function<double(const RMat&)>& score,
                int iterations, Rng& rng) {
  double best = score(w);
  double step = 0.5;
  for (int it = 0; it < iterations; ++it) {
    RMat cand = w;
    if (rng.uniform01() < 0.5) {
      int row = static_cast<int>(rng.below(w.rows()));
      for (int j = 0; j < w.cols(); ++j) cand(row, j) += step * rng.gaussian();
      cand.row(row) = project_simplex(cand.row(row).transpose()).transpose();
    } else {
      for (int x = 0; x < w.rows(); ++x) {
        for (int j = 0; j < w.cols(); ++j) cand(x, j) += step * rng.gaussian();
        cand.row(x) = project_simplex(cand.row(x).transpose()).transpose();
      }
    }
    double sc = score(cand);
    if (sc > best) {
      best = sc;
      w = std::move(cand);
    } else {
      step = std::max(1e-4, step * 0.97);
    }
  }
  return w;
}

// Smallest blend toward a feasible anchor that satisfies the constraint;
// `violation` must be continuous and <= 0 at the anchor.
RMat restore_feasibility(const RMat& w, const RMat& anchor,
                         const std::function<double(const RMat&)>& violation) {
  if (violation(w) <= 0.0) return w;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    RMat blend = (1.0 - mid) * w + mid * anchor;
    if (violation(blend) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return (1.0 - hi) * w + hi * anchor;
}

// Streams all compositions of `steps` grid increments into k simplex weights.
template <class F>
void for_each_grid_row(int k, int steps, F&& visit) {
  std::vector<int> parts(k, 0);
  RVec row(k);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == k - 1) {
      parts[pos] = left;
      for (int i = 0; i < k; ++i) row[i] = static_cast<double>(parts[i]) / steps;
      visit(static_cast<const RVec&>(row));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      parts[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, steps);
}

// I(X;Y) and I(Y;B) for a test channel on a fixed ensemble, computed from raw
// entropies (no per-call validation).
struct CrEvaluator {
  RVec p;
  std::vector<Mat> rho;
  double s_bar = 0.0;  // entropy of the fixed barycenter

  explicit CrEvaluator(const Ensemble& e) : p(e.prior.probs()) {
    for (int x = 0; x < e.size(); ++x) rho.push_back(e.states[x].matrix());
    s_bar = von_neumann_entropy_raw(e.average());
  }

  void eval(const RMat& w, double& ixy, double& iyb) const {
    const int kx = static_cast<int>(w.rows());
    const int ky = static_cast<int>(w.cols());
    RVec q = w.transpose() * p;
    double h_cond = 0.0;
    for (int x = 0; x < kx; ++x)
      h_cond += p[x] * shannon_entropy_raw(w.row(x).transpose());
    ixy = shannon_entropy_raw(q) - h_cond;
    iyb = s_bar;
    const int d = static_cast<int>(rho.front().rows());
    Mat sigma(d, d);
    for (int y = 0; y < ky; ++y) {
      if (q[y] <= 1e-15) continue;
      sigma.setZero();
      for (int x = 0; x < kx; ++x)
        if (p[x] * w(x, y) > 0.0) sigma += (p[x] * w(x, y)) * rho[x];
      iyb -= q[y] * von_neumann_entropy_raw(sigma / q[y]);
    }
  }
};

// Rate I(X;Y) - I(Y;Z) and optimal-decoder distortion for a test channel on a
// fixed classical source with side information.
struct WzEvaluator {
  RMat pxz;
  RMat dist;
  RVec p;

  WzEvaluator(const RMat& joint_xz, const DistortionMeasure& d)
      : pxz(joint_xz), dist(d.table()), p(joint_xz.rowwise().sum()) {}

  void eval(const RMat& w, double& rate, double& e_dist,
            std::vector<std::vector<int>>* decoder) const {
    const int kx = static_cast<int>(pxz.rows());
    const int kz = static_cast<int>(pxz.cols());
    const int ky = static_cast<int>(w.cols());
    const int kxh = static_cast<int>(dist.cols());
    RVec q = w.transpose() * p;
    double h_cond = 0.0;
    for (int x = 0; x < kx; ++x)
      h_cond += p[x] * shannon_entropy_raw(w.row(x).transpose());
    double ixy = shannon_entropy_raw(q) - h_cond;
    RMat joint_yz = w.transpose() * pxz;  // (y, z)
    double iyz = mutual_information_classical(joint_yz);
    rate = ixy - iyz;

    if (decoder) decoder->assign(ky, std::vector<int>(kz, 0));
    e_dist = 0.0;
    for (int y = 0; y < ky; ++y)
      for (int z = 0; z < kz; ++z) {
        double best = 0.0;
        int arg = 0;
        for (int xh = 0; xh < kxh; ++xh) {
          double cost = 0.0;
          for (int x = 0; x < kx; ++x)
            cost += pxz(x, z) * w(x, y) * dist(x, xh);
          if (xh == 0 || cost < best) {
            best = cost;
            arg = xh;
          }
        }
        e_dist += best;
        if (decoder) (*decoder)[y][z] = arg;
      }
  }
};

struct StartResult {
  RMat w;
  double score = 0.0;
};

// Multi-start driver with deterministic indexed reduction.
RMat multi_start(int kx, int ky, const SearchBudget& budget,
                 const RMat* warm_start, const RMat& anchor,
                 const std::function<double(const RMat&)>& score,
                 const std::function<double(const RMat&)>& violation) {
  const int starts = std::max(1, budget.starts);
  std::vector<StartResult> results(starts);
  parallel_for(
      starts,
      [&](std::int64_t i) {
        RMat w0;
        if (i == 0 && warm_start)
          w0 = *warm_start;
        else if (i == 0 || i == 1)
          w0 = identity_embedding(kx, ky);
        else if (i == 2)
          w0 = anchor;
        else {
          Rng rng = derive_rng(budget.seed, "rates-start", i);
          w0 = random_channel(kx, ky, rng);
        }
        Rng rng = derive_rng(budget.seed, "rates-climb", i);
        RMat climbed = hill_climb(std::move(w0), score, budget.iterations, rng);
        // Compare starts on their restored (feasible) values: a start that
        // buried itself in the penalized region must not outrank a feasible
        // one it would lose to after restoration.
        results[i].w = restore_feasibility(std::move(climbed), anchor, violation);
        results[i].score = score(results[i].w);
      },
      budget.threads);
  int best = 0;
  for (int i = 1; i < starts; ++i)
    if (results[i].score > results[best].score) best = i;
  return results[best].w;
}

}  // namespace

DistortionMeasure::DistortionMeasure(RMat table) : m_(std::move(table)) {
  if (m_.rows() < 1 || m_.cols() < 1)
    throw ValidationError("distortion: empty table");
  if ((m_.array() < 0.0).any())
    throw ValidationError("distortion: negative entry");
}

CurvePoint cr_distillation(const Ensemble& e, double r,
                           const SearchBudget& budget, const RMat* warm_start) {
  if (r < 0.0) throw ValidationError("cr_distillation: budget must be >= 0");
  const int kx = e.size();
  const int ky = kx + 1;
  if (warm_start && (warm_start->rows() != kx || warm_start->cols() != ky))
    throw ValidationError("cr_distillation: warm start has wrong shape");
  CrEvaluator ev(e);
  auto violation = [&](const RMat& w) {
    double ixy, iyb;
    ev.eval(w, ixy, iyb);
    return ixy - iyb - r;
  };
  auto score = [&](const RMat& w) {
    double ixy, iyb;
    ev.eval(w, ixy, iyb);
    double g = std::max(0.0, ixy - iyb - r);
    return iyb - budget.penalty * g * g;
  };
  RMat anchor = uniform_rows(kx, ky);  // I(X;Y) = I(Y;B) = 0: always feasible
  RMat w = multi_start(kx, ky, budget, warm_start, anchor, score, violation);
  w = restore_feasibility(w, anchor, violation);

  CurvePoint pt;
  pt.abscissa = r;
  double ixy, iyb;
  ev.eval(w, ixy, iyb);
  pt.ordinate = iyb;
  pt.channel = std::move(w);
  pt.constraint_slack = r - (ixy - iyb);

  if (budget.certify) {
    if (kx != 2)
      throw ValidationError("cr_distillation: grid certificate needs |X| = 2");
    int steps = static_cast<int>(std::lround(1.0 / budget.grid_resolution));
    std::vector<RVec> rows;
    for_each_grid_row(ky, steps, [&](const RVec& row) { rows.push_back(row); });
    std::vector<double> best_per_row(rows.size(),
                                     -std::numeric_limits<double>::infinity());
    parallel_for(
        static_cast<std::int64_t>(rows.size()),
        [&](std::int64_t i) {
          RMat cand(kx, ky);
          cand.row(0) = rows[i].transpose();
          double ix, ib;
          for (const RVec& second : rows) {
            cand.row(1) = second.transpose();
            ev.eval(cand, ix, ib);
            if (ix - ib <= r + 1e-12 && ib > best_per_row[i])
              best_per_row[i] = ib;
          }
        },
        budget.threads);
    pt.certificate = *std::max_element(best_per_row.begin(), best_per_row.end());
    pt.certificate_gap = pt.ordinate - pt.certificate;
    pt.certified = true;
  }
  return pt;
}

CurvePoint wyner_ziv_rate(const RMat& joint_xz, const DistortionMeasure& dist,
                          double d, const SearchBudget& budget,
                          const RMat* warm_start) {
  if (joint_xz.rows() < 1 || joint_xz.cols() < 1 ||
      (joint_xz.array() < -kProbTol).any() ||
      std::abs(joint_xz.sum() - 1.0) > 1e-9)
    throw ValidationError("wyner_ziv: joint_xz is not a distribution");
  if (dist.num_sources() != joint_xz.rows())
    throw ValidationError("wyner_ziv: distortion rows != source alphabet");
  if (d < 0.0) throw ValidationError("wyner_ziv: distortion budget < 0");
  const int kx = static_cast<int>(joint_xz.rows());
  const int ky = kx + 1;
  if (warm_start && (warm_start->rows() != kx || warm_start->cols() != ky))
    throw ValidationError("wyner_ziv: warm start has wrong shape");

  WzEvaluator ev(joint_xz, dist);
  double floor = 0.0;  // distortion with the source revealed to the decoder
  for (int x = 0; x < kx; ++x)
    floor += ev.p[x] * dist.table().row(x).minCoeff();
  if (d < floor - kSlackTol)
    throw InfeasibleInstance("wyner_ziv: distortion budget below floor " +
                             std::to_string(floor));

  auto violation = [&](const RMat& w) {
    double rate, e_dist;
    ev.eval(w, rate, e_dist, nullptr);
    return e_dist - d;
  };
  auto score = [&](const RMat& w) {
    double rate, e_dist;
    ev.eval(w, rate, e_dist, nullptr);
    double g = std::max(0.0, e_dist - d);
    return -rate - budget.penalty * g * g;
  };
  // y = x reveals the source, hitting the distortion floor: always feasible.
  RMat anchor = identity_embedding(kx, ky);
  RMat w = multi_start(kx, ky, budget, warm_start, anchor, score, violation);
  w = restore_feasibility(w, anchor, violation);

  CurvePoint pt;
  pt.abscissa = d;
  double rate, e_dist;
  ev.eval(w, rate, e_dist, &pt.decoder);
  pt.ordinate = rate;
  pt.channel = std::move(w);
  pt.constraint_slack = d - e_dist;

  if (budget.certify) {
    if (kx != 2)
      throw ValidationError("wyner_ziv: grid certificate needs |X| = 2");
    int steps = static_cast<int>(std::lround(1.0 / budget.grid_resolution));
    std::vector<RVec> rows;
    for_each_grid_row(ky, steps, [&](const RVec& row) { rows.push_back(row); });
    std::vector<double> best_per_row(rows.size(),
                                     std::numeric_limits<double>::infinity());
    parallel_for(
        static_cast<std::int64_t>(rows.size()),
        [&](std::int64_t i) {
          RMat cand(kx, ky);
          cand.row(0) = rows[i].transpose();
          double rt, ed;
          for (const RVec& second : rows) {
            cand.row(1) = second.transpose();
            ev.eval(cand, rt, ed, nullptr);
            if (ed <= d + 1e-12 && rt < best_per_row[i]) best_per_row[i] = rt;
          }
        },
        budget.threads);
    pt.certificate = *std::min_element(best_per_row.begin(), best_per_row.end());
    pt.certificate_gap = pt.certificate - pt.ordinate;
    pt.certified = true;
  }
  return pt;
}

std::vector<CurvePoint> cr_curve(const Ensemble& e,
                                 const std::vector<double>& grid,
                                 const SearchBudget& budget) {
  std::vector<CurvePoint> curve;
  const RMat* warm = nullptr;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0 && grid[i] < grid[i - 1])
      throw ValidationError("cr_curve: grid must be ascending");
    curve.push_back(cr_distillation(e, grid[i], budget, warm));
    warm = &curve.back().channel;
  }
  return curve;
}

std::vector<CurvePoint> wyner_ziv_curve(const RMat& joint_xz,
                                        const DistortionMeasure& dist,
                                        const std::vector<double>& grid,
                                        const SearchBudget& budget) {
  std::vector<CurvePoint> curve;
  const RMat* warm = nullptr;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0 && grid[i] < grid[i - 1])
      throw ValidationError("wyner_ziv_curve: grid must be ascending");
    curve.push_back(wyner_ziv_rate(joint_xz, dist, grid[i], budget, warm));
    warm = &curve.back().channel;
  }
  return curve;
}

SymbolDecoder SymbolDecoder::from_table(const std::vector<int>& y_to_xhat,
                                        int dim, int num_xhat) {
  SymbolDecoder dec;
  dec.elements.resize(y_to_xhat.size());
  for (std::size_t y = 0; y < y_to_xhat.size(); ++y) {
    if (y_to_xhat[y] < 0 || y_to_xhat[y] >= num_xhat)
      throw ValidationError("symbol decoder: label out of range");
    dec.elements[y].assign(num_xhat, Mat::Zero(dim, dim));
    dec.elements[y][y_to_xhat[y]] = Mat::Identity(dim, dim);
  }
  return dec;
}

RdCodeReport rd_code_from_simulation(const SimulationCode& code,
                                     const DistortionMeasure& dist,
                                     const SymbolDecoder& dec, int trials,
                                     Rng& rng) {
  if (trials < 1) throw ValidationError("rd code: trials must be positive");
  if (dist.num_sources() != code.source.size())
    throw ValidationError("rd code: distortion rows != source alphabet");
  const int ky = code.channel.num_outputs();
  if (static_cast<int>(dec.elements.size()) < ky)
    throw ValidationError("rd code: decoder smaller than output alphabet");
  const int d = code.source.dim();
  const int kxh = dist.num_reconstructions();
  for (int y = 0; y < ky; ++y) {
    if (static_cast<int>(dec.elements[y].size()) != kxh)
      throw ValidationError("rd code: decoder label count != distortion cols");
    Mat total = Mat::Zero(d, d);
    for (const Mat& elem : dec.elements[y]) {
      if (elem.rows() != d || elem.cols() != d)
        throw ValidationError("rd code: decoder element dimension mismatch");
      total += elem;
    }
    if ((total - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
      throw ValidationError("rd code: decoder POVM does not resolve identity");
  }

  const std::vector<int> dims(code.n, d);
  RdCodeReport rep;
  rep.trials = trials;
  rep.distortion_per_l.assign(code.num_l, 0.0);
  for (int l = 0; l < code.num_l; ++l) {
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      Seq xn = code.source.prior.sample_sequence(code.n, rng);
      SimulationOutcome out = simulate_once(code, xn, rng, true, l);
      const Mat& post = *out.post;
      for (int j = 0; j < code.n; ++j) {
        Mat site = code.n == 1 ? post : partial_trace(post, dims, {j});
        RVec probs(kxh);
        for (int xh = 0; xh < kxh; ++xh)
          probs[xh] = std::max(
              0.0, (dec.elements[out.y_hat[j]][xh].array() *
                    site.array().conjugate())
                       .sum()
                       .real());
        int xh = probs.sum() > 0.0 ? rng.categorical(probs)
                                   : 0;  // degenerate site: fixed label
        sum += dist(xn[j], xh) / code.n;
      }
    }
    rep.distortion_per_l[l] = sum / trials;
  }
  rep.best_l = 0;
  for (int l = 1; l < code.num_l; ++l)
    if (rep.distortion_per_l[l] < rep.distortion_per_l[rep.best_l])
      rep.best_l = l;
  rep.best_distortion = rep.distortion_per_l[rep.best_l];
  rep.average_distortion = 0.0;
  for (double v : rep.distortion_per_l) rep.average_distortion += v;
  rep.average_distortion /= code.num_l;
  return rep;
}

}  // namespace chansim
