#include <cmath>
#include <set>

#include "chansim/protocol.hpp"
#include "chansim/qinfo.hpp"
#include "chansim/rng.hpp"
#include "doctest.h"

using namespace chansim;

namespace {

constexpr double kRDefault = 1.0046431686377305;  // I(X;Y)-I(Y;B)+4*0.2
constexpr double kCDefault = 0.2689955935892812;  // h(0.1)-0.2
constexpr double kSDefault = 0.12636123777298827; // I(Y;B)-0.2

Ensemble reference_ensemble() {
  Mat zero(2, 2), plus(2, 2);
  zero << 1, 0, 0, 0;
  plus << 0.5, 0.5, 0.5, 0.5;
  return Ensemble(Distribution::uniform(2), {DensityOperator(zero), DensityOperator(plus)});
}

Channel bsc(double p) {
  RMat w(2, 2);
  w << 1 - p, p, p, 1 - p;
  return Channel(w);
}

SimulationCode reference_code(int n, Rng& rng) {
  ExtendedState ext = apply_channel(reference_ensemble(), bsc(0.1));
  return build_simulation_code(reference_ensemble(), bsc(0.1), n, default_rates(ext, 0.2), rng,
                               SimulationOptions{});
}

}  // namespace

TEST_SUITE("protocol") {
  TEST_CASE("default rates of the reference instance") {
    ExtendedState ext = apply_channel(reference_ensemble(), bsc(0.1));
    Rates rates = default_rates(ext, 0.2);
    CHECK(rates.r == doctest::Approx(kRDefault).epsilon(1e-12));
    CHECK(rates.c == doctest::Approx(kCDefault).epsilon(1e-12));
    CHECK(rates.s == doctest::Approx(kSDefault).epsilon(1e-12));
    // The sum covers the dilution cost H(Y) + c delta.
    CHECK(rates.r + rates.c + rates.s >= 1.0 + 0.2 - 1e-12);
    // Negative prescriptions clamp to zero.
    Mat id = Mat::Identity(2, 2) / 2.0;
    Ensemble blank(Distribution::uniform(2), {DensityOperator(id), DensityOperator(id)});
    RMat noiseless(2, 2);
    noiseless << 1, 0, 0, 1;
    Rates edge = default_rates(apply_channel(blank, Channel(noiseless)), 0.2);
    CHECK(edge.s == 0.0);  // I(Y;B)=0 for blank side information
  }

  TEST_CASE("index layout follows the rate prescription") {
    Rng rng(79);
    Rates rates{1.0, 0.5, 0.25};
    SimulationCode code =
        build_simulation_code(reference_ensemble(), bsc(0.1), 4, rates, rng, SimulationOptions{});
    CHECK(code.num_m == 16);
    CHECK(code.num_l == 4);
    CHECK(code.num_s == 2);
    CHECK(code.codebook.rows() == 128);
    CHECK(code.encoders.size() == 4);
    CHECK(code.encoders[0].size() == 32);       // (m,s) block per l
    CHECK(code.encoders[0].num_inputs() == 16); // |X|^4
    std::set<int> rows;
    for (int l = 0; l < code.num_l; ++l)
      for (int m = 0; m < code.num_m; ++m)
        for (int s = 0; s < code.num_s; ++s) rows.insert(code.row_of(l, m, s));
    CHECK(rows.size() == 128);
    CHECK(*rows.begin() == 0);
    CHECK(*rows.rbegin() == 127);
    Seq w = code.word(2, 5, 1);
    for (int j = 0; j < 4; ++j) CHECK(w[j] == code.codebook(code.row_of(2, 5, 1), j));
  }

  TEST_CASE("single run keeps the bookkeeping consistent") {
    Rng rng(83);
    SimulationCode code = reference_code(2, rng);
    Seq xn(2);
    xn << 0, 1;
    for (int t = 0; t < 25; ++t) {
      SimulationOutcome out = simulate_once(code, xn, rng, true);
      CHECK(out.l >= 0);
      CHECK(out.l < code.num_l);
      CHECK(out.m >= 0);
      CHECK(out.m < code.num_m);
      CHECK(out.s >= 0);
      CHECK(out.s < code.num_s);
      CHECK(out.s_prime >= 0);
      CHECK(out.s_prime < code.num_s);
      CHECK((out.y_tilde - code.word(out.l, out.m, out.s)).cwiseAbs().maxCoeff() == 0);
      CHECK((out.y_hat - code.word(out.l, out.m, out.s_prime)).cwiseAbs().maxCoeff() == 0);
      if (out.s_prime == out.s)
        CHECK((out.y_hat - out.y_tilde).cwiseAbs().maxCoeff() == 0);
      CHECK(out.disturbance >= 0.0);
      CHECK(out.disturbance <= 1.0 + 1e-9);
      REQUIRE(out.post.has_value());
      CHECK(std::abs(out.post->trace().real() - 1.0) < 1e-9);
    }
    SimulationOutcome pinned = simulate_once(code, xn, rng, false, 1);
    CHECK(pinned.l == 1);
    CHECK_FALSE(pinned.post.has_value());
  }

  TEST_CASE("exact channel is a proper conditional law") {
    Rng rng(89);
    SimulationCode code = reference_code(2, rng);
    ExactChannel exact = exact_simulated_channel(code);
    CHECK(exact.num_y == 4);
    CHECK(exact.w_tilde.rows() == 4);
    CHECK(exact.w_tilde.cols() == 4);
    for (int x = 0; x < 4; ++x) {
      CHECK(exact.w_tilde.row(x).sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(exact.w_tilde.row(x).minCoeff() >= -1e-12);
      // Marginalizing the receiver's output recovers w_tilde.
      RVec margin = RVec::Zero(4);
      double total = 0.0;
      for (auto& [key, val] : exact.joint[static_cast<std::size_t>(x)]) {
        margin[static_cast<Eigen::Index>(key / exact.num_y)] += val;
        total += val;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
      for (int yt = 0; yt < 4; ++yt)
        CHECK(margin[yt] == doctest::Approx(exact.w_tilde(x, yt)).epsilon(1e-9));
    }
  }

  TEST_CASE("error report: exact classical, exact quantum, sampled disturbance") {
    Rng rng(97);
    SimulationCode code = reference_code(2, rng);
    Rng eval(101);
    ErrorReport rep = estimate_simulation_error(code, 50, eval);
    CHECK(rep.classical_exact);
    CHECK(rep.classical_se == 0.0);
    CHECK(rep.classical_l1 >= 0.0);
    CHECK(rep.classical_l1 <= 2.0 + 1e-9);
    CHECK(rep.has_quantum);
    CHECK(rep.quantum_l1 >= rep.classical_l1 - 1e-9);  // trace dominates
    CHECK(rep.quantum_l1 <= 2.0 + 1e-9);
    CHECK(rep.mean_disturbance >= 0.0);
    CHECK(rep.trials == 50);
    // Determinism of the exact parts.
    Rng eval2(7777);
    ErrorReport rep2 = estimate_simulation_error(code, 10, eval2);
    CHECK(rep2.classical_l1 == rep.classical_l1);
    CHECK(rep2.quantum_l1 == rep.quantum_l1);
  }

  TEST_CASE("degenerate payload keeps both outputs aligned") {
    Rng rng(103);
    Rates rates{1.3, 1.3, 0.0};
    SimulationCode code =
        build_simulation_code(reference_ensemble(), bsc(0.1), 3, rates, rng, SimulationOptions{});
    CHECK(code.num_s == 1);
    Rng run(107);
    for (int t = 0; t < 10; ++t) {
      SimulationOutcome out = simulate_once_sampled(code, run);
      CHECK(out.s == 0);
      CHECK(out.s_prime == 0);
      CHECK((out.y_hat - out.y_tilde).cwiseAbs().maxCoeff() == 0);
    }
  }

  TEST_CASE("derandomize keeps the paired minimum") {
    DerandomizeResult res =
        derandomize(reference_ensemble(), bsc(0.1), 2,
                    Rates{kRDefault, kCDefault, kSDefault}, 4, 109, 20);
    CHECK(res.scores.size() == 4);
    double best = res.scores[0];
    int arg = 0;
    for (int k = 1; k < 4; ++k)
      if (res.scores[static_cast<std::size_t>(k)] < best) {
        best = res.scores[static_cast<std::size_t>(k)];
        arg = k;
      }
    CHECK(res.best_index == arg);
    CHECK(res.best_score == doctest::Approx(best));
    CHECK(res.best_score ==
          doctest::Approx(res.best_report.classical_l1 + res.best_report.mean_disturbance));
    DerandomizeResult res2 =
        derandomize(reference_ensemble(), bsc(0.1), 2,
                    Rates{kRDefault, kCDefault, kSDefault}, 4, 109, 20);
    CHECK(res2.best_index == res.best_index);
    for (int k = 0; k < 4; ++k)
      CHECK(res2.scores[static_cast<std::size_t>(k)] ==
            res.scores[static_cast<std::size_t>(k)]);
  }

  TEST_CASE("naive baseline closed form") {
    NaiveReport rep = naive_baseline(reference_ensemble(), bsc(0.1), 2, 0.2);
    CHECK(rep.rate == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.achieved_rate == doctest::Approx(std::log2(3.0) / 2).epsilon(1e-12));
    CHECK(rep.classical_l1 == doctest::Approx(1.0).epsilon(1e-12));  // 2 * (1 - 1/2)
    CHECK(rep.mean_disturbance == 0.0);
  }

  TEST_CASE("sequence indexing is lexicographic") {
    Seq s = index_to_seq(0, 2, 3);
    CHECK(s.sum() == 0);
    Seq t(2);
    t << 0, 1;
    CHECK(seq_to_index(t, 2) == 1);
    t << 1, 0;
    CHECK(seq_to_index(t, 2) == 2);
    for (std::int64_t i = 0; i < 27; ++i)
      CHECK(seq_to_index(index_to_seq(i, 3, 3), 3) == i);
  }

  TEST_CASE("guards reject oversized codebooks") {
    Rng rng(113);
    Rates huge{13.0, 13.0, 0.0};
    CHECK_THROWS_AS(build_simulation_code(reference_ensemble(), bsc(0.1), 2, huge, rng,
                                          SimulationOptions{}),
                    GuardExceeded);
  }
}
