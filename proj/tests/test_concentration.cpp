#include <cmath>
#include <map>

#include "chansim/concentration.hpp"
#include "chansim/qinfo.hpp"
#include "chansim/rng.hpp"
#include "chansim/typicality.hpp"
#include "doctest.h"

using namespace chansim;

namespace {

Distribution bern(double p1) {
  RVec p(2);
  p << 1 - p1, p1;
  return Distribution(p);
}

Channel bsc(double p) {
  RMat w(2, 2);
  w << 1 - p, p, p, 1 - p;
  return Channel(w);
}

// Brute-force L1 between q^n and the empirical table law, independent of the
// library's closed-form accumulation.
double dilution_l1_oracle(const DilutionCode& code) {
  std::map<std::vector<int>, double> emp;
  const double u = 1.0 / static_cast<double>(code.size());
  for (Eigen::Index i = 0; i < code.size(); ++i) {
    std::vector<int> key(static_cast<std::size_t>(code.table.cols()));
    for (Eigen::Index j = 0; j < code.table.cols(); ++j)
      key[static_cast<std::size_t>(j)] = code.table(i, j);
    emp[key] += u;
  }
  double l1 = 0.0, seen = 0.0;
  for (auto& [key, mass] : emp) {
    double qn = 1.0;
    for (int sym : key) qn *= code.q[sym];
    l1 += std::abs(mass - qn);
    seen += qn;
  }
  return l1 + (1.0 - seen);
}

}  // namespace

TEST_SUITE("concentration") {
  TEST_CASE("chernoff tail shape") {
    CHECK(chernoff_tail(100, 0.5, 0.1, 1.0) ==
          doctest::Approx(2 * std::exp(-kKappa0 * 100 * 0.5 * 0.01)).epsilon(1e-12));
    CHECK(chernoff_tail(100, 0.5, 0.2, 1.0) < chernoff_tail(100, 0.5, 0.1, 1.0));
    CHECK(chernoff_tail(200, 0.5, 0.1, 1.0) < chernoff_tail(100, 0.5, 0.1, 1.0));
    CHECK(kKappa0 == doctest::Approx(1.0 / (2.0 * std::log(2.0))).epsilon(1e-15));
  }

  TEST_CASE("sequence log-probabilities") {
    Distribution p = bern(0.7);
    Seq xn(3);
    xn << 0, 1, 1;
    CHECK(log2_prob(p, xn) ==
          doctest::Approx(std::log2(0.3) + 2 * std::log2(0.7)).epsilon(1e-12));
    Channel back = bsc(0.1);
    Seq yn(3);
    yn << 0, 0, 1;
    // P(x|y) factors: back(y_j, x_j).
    CHECK(log2_cond_prob(back, yn, xn) ==
          doctest::Approx(std::log2(0.9) + std::log2(0.1) + std::log2(0.9)).epsilon(1e-12));
  }

  TEST_CASE("dilution deviation matches the brute-force oracle") {
    Rng rng(41);
    for (int t = 0; t < 5; ++t) {
      DilutionCode code = dilute(bern(0.6), 6, 40, rng);
      DeviationReport rep = dilution_deviation(code);
      CHECK(rep.exact);
      CHECK(rep.value == doctest::Approx(dilution_l1_oracle(code)).epsilon(1e-12));
    }
  }

  TEST_CASE("dilution from an explicit table is deterministic") {
    SeqTable table(2, 2);
    table << 0, 0, 1, 1;
    DilutionCode code = dilution_from_table(Distribution::uniform(2), table);
    // Empirical law: 1/2 on 00 and 11; q^n is 1/4 everywhere.
    CHECK(dilution_deviation(code).value == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("dilution deviation shrinks with the table") {
    Rng rng(43);
    DilutionCode small = dilute(Distribution::uniform(2), 8, 1 << 6, rng);
    DilutionCode large = dilute(Distribution::uniform(2), 8, 1 << 14, rng);
    CHECK(dilution_deviation(large).value < dilution_deviation(small).value);
  }

  TEST_CASE("dilution tail bound is monotone and eventually nonvacuous") {
    Distribution q = Distribution::uniform(2);
    double loose = dilution_tail_bound(q, 12, 1 << 14, 0.2, 0.3);
    double tight = dilution_tail_bound(q, 12, 1 << 20, 0.2, 0.3);
    CHECK(tight < loose);
    // gamma = 2^{n(1 + 0.2)}; M = 2^24 drives the exponent hard negative.
    CHECK(dilution_tail_bound(q, 10, 1 << 24, 0.2, 0.5) < 1e-100);
    CHECK_THROWS_AS(dilution_tail_bound(q, 10, 0, 0.2, 0.5), ValidationError);
  }

  TEST_CASE("covering encoder invariants") {
    Distribution p = Distribution::uniform(2);
    Channel w = bsc(0.2);
    Distribution q = w.push(p);
    RMat b(2, 2);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) b(y, x) = p[x] * w(x, y) / q[y];
    Channel backward(b);
    Rng rng(47);
    CoveringCode code = covering_encoder(q, backward, 6, 24, 1.5, 0.15, rng);
    CHECK(code.size() == 24);
    CHECK(code.num_inputs() == 64);
    for (Eigen::Index r = 0; r < code.encoder.rows(); ++r) {
      CHECK(code.encoder.row(r).sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(code.encoder.row(r).minCoeff() >= -1e-15);
    }
    CHECK(code.trim_loss >= 0.0);
    CHECK(code.trim_loss <= 1.0);
    CHECK(code.max_subnorm >= 0.0);
    // The pre-fill row mass stays subnormalized whenever the concentration
    // event holds; rows are renormalized (and the flag cleared) otherwise.
    if (code.iota_holds) CHECK(code.max_subnorm <= 1.0 + 1e-12);
    CHECK(code.log2_K > code.log2_k);

    DeviationReport rep = covering_deviation(code);
    CHECK(rep.exact);
    CHECK(rep.value >= 0.0);
    CHECK(rep.value <= 2.0 + 1e-12);

    // Monte Carlo estimate agrees with the exact accumulation.
    Rng mc_rng(49);
    DeviationReport mc = covering_deviation_mc(code, 400, mc_rng);
    CHECK_FALSE(mc.exact);
    CHECK(std::abs(mc.value - rep.value) < 5 * mc.std_error + 0.05);

    CHECK(covering_tail_bound(code) > 0.0);
  }

  TEST_CASE("covering deviation drops as the codebook grows") {
    Distribution p = Distribution::uniform(2);
    Channel w = bsc(0.2);
    Distribution q = w.push(p);
    RMat b(2, 2);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) b(y, x) = p[x] * w(x, y) / q[y];
    Channel backward(b);
    double mean_small = 0.0, mean_large = 0.0;
    for (int t = 0; t < 5; ++t) {
      Rng r1 = derive_rng(51, "cover-small", static_cast<std::uint64_t>(t));
      Rng r2 = derive_rng(51, "cover-large", static_cast<std::uint64_t>(t));
      mean_small += covering_deviation(covering_encoder(q, backward, 8, 4, 1.5, 0.15, r1)).value;
      mean_large +=
          covering_deviation(covering_encoder(q, backward, 8, 96, 1.5, 0.15, r2)).value;
    }
    CHECK(mean_large < mean_small);
  }

  TEST_CASE("covering from a fixed table is reproducible") {
    Distribution q = Distribution::uniform(2);
    RMat b(2, 2);
    b << 0.8, 0.2, 0.2, 0.8;
    Channel backward(b);
    SeqTable table(3, 4);
    table << 0, 1, 0, 1, 1, 0, 1, 0, 0, 0, 1, 1;
    CoveringCode a = covering_from_table(q, backward, table, 1.0, 0.2);
    CoveringCode c = covering_from_table(q, backward, table, 1.0, 0.2);
    CHECK((a.encoder - c.encoder).cwiseAbs().maxCoeff() == 0.0);
    SeqTable bad(1, 2);
    bad << 0, 3;
    CHECK_THROWS_AS(covering_from_table(q, backward, bad, 1.0, 0.2), ValidationError);
  }
}
