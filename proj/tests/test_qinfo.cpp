#include <cmath>

#include "chansim/linalg.hpp"
#include "chansim/qinfo.hpp"
#include "chansim/random_states.hpp"
#include "chansim/rng.hpp"
#include "doctest.h"

using namespace chansim;

namespace {

// Frozen oracle values (mpmath, 50 digits, rounded to double).
constexpr double kH37 = 0.8812908992306926;        // H(0.3, 0.7)
constexpr double kH01 = 0.4689955935892812;        // h(0.1)
constexpr double kIDsbs = 0.2780719051126377;      // 1 - h(0.2)
constexpr double kHolevoRef = 0.600876036692856;   // {|0>,|+>} uniform
constexpr double kIxyRef = 0.5310044064107188;     // 1 - h(0.1)
constexpr double kIybRef = 0.32636123777298826;    // output-ensemble Holevo
constexpr double kRminRef = 0.20464316863773052;   // kIxyRef - kIybRef
constexpr double kSumMinRef = 0.6736387622270117;  // 1 - kIybRef

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

}  // namespace

TEST_SUITE("qinfo") {
  TEST_CASE("shannon entropy") {
    CHECK(shannon_entropy(Distribution::uniform(2)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(shannon_entropy(Distribution::uniform(8)) == doctest::Approx(3.0).epsilon(1e-12));
    RVec p(2);
    p << 0.3, 0.7;
    CHECK(shannon_entropy(Distribution(p)) == doctest::Approx(kH37).epsilon(1e-14));
    RVec d(2);
    d << 1.0, 0.0;
    CHECK(shannon_entropy(Distribution(d)) == doctest::Approx(0.0));
    RVec bad(2);
    bad << 0.6, 0.6;
    CHECK_THROWS_AS(Distribution{bad}, ValidationError);
  }

  TEST_CASE("von neumann entropy") {
    Rng rng(7);
    CHECK(von_neumann_entropy(random_pure_state(4, rng)) == doctest::Approx(0.0).epsilon(1e-9));
    Mat mixed = Mat::Identity(4, 4) / 4.0;
    CHECK(von_neumann_entropy(DensityOperator(mixed)) == doctest::Approx(2.0).epsilon(1e-12));
    Mat diag = Mat::Zero(2, 2);
    diag(0, 0) = 0.3;
    diag(1, 1) = 0.7;
    CHECK(von_neumann_entropy(DensityOperator(diag)) == doctest::Approx(kH37).epsilon(1e-12));
  }

  TEST_CASE("cq embedding splits entropy") {
    Rng rng(11);
    Ensemble e = random_ensemble(3, 2, rng);
    double h_joint = von_neumann_entropy(embed_cq(e));
    double expect = shannon_entropy(e.prior);
    for (int x = 0; x < e.size(); ++x)
      expect += e.prior[x] * von_neumann_entropy(e.states[static_cast<std::size_t>(x)]);
    CHECK(h_joint == doctest::Approx(expect).epsilon(1e-10));
  }

  TEST_CASE("holevo information") {
    CHECK(holevo_information(reference_ensemble()) ==
          doctest::Approx(kHolevoRef).epsilon(1e-12));
    // Identical states carry nothing.
    Mat rho(2, 2);
    rho << 0.5, 0.25, 0.25, 0.5;
    Ensemble same(Distribution::uniform(2), {DensityOperator(rho), DensityOperator(rho)});
    CHECK(holevo_information(same) == doctest::Approx(0.0).epsilon(1e-12));
    // Orthogonal states are classical: Holevo = H(p).
    Mat e0 = Mat::Zero(2, 2), e1 = Mat::Zero(2, 2);
    e0(0, 0) = 1;
    e1(1, 1) = 1;
    RVec p(2);
    p << 0.3, 0.7;
    Ensemble classical(Distribution(p), {DensityOperator(e0), DensityOperator(e1)});
    CHECK(holevo_information(classical) == doctest::Approx(kH37).epsilon(1e-12));
    // Bounded by the prior entropy.
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
      Ensemble e = random_ensemble(3, 3, rng);
      CHECK(holevo_information(e) <= shannon_entropy(e.prior) + 1e-9);
      CHECK(holevo_information(e) >= -1e-9);
    }
  }

  TEST_CASE("mutual information on known states") {
    // Product state: I(A;B) = 0.
    Rng rng(17);
    Mat a = random_density(2, rng).matrix();
    Mat b = random_density(3, rng).matrix();
    Mat prod = kron(a, b);
    CHECK(mutual_information(prod, {2, 3}, {0}, {1}) == doctest::Approx(0.0).epsilon(1e-10));
    // Bell pair: I(A;B) = 2.
    CVec bell(4);
    bell << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
    Mat rho = bell * bell.adjoint();
    CHECK(mutual_information(rho, {2, 2}, {0}, {1}) == doctest::Approx(2.0).epsilon(1e-10));
  }

  TEST_CASE("pure state marginal duality") {
    Rng rng(19);
    for (int t = 0; t < 20; ++t) {
      DensityOperator psi = random_pure_state(6, rng);
      Mat rho_a = partial_trace(psi.matrix(), {2, 3}, {0});
      Mat rho_b = partial_trace(psi.matrix(), {2, 3}, {1});
      CHECK(von_neumann_entropy_raw(rho_a) ==
            doctest::Approx(von_neumann_entropy_raw(rho_b)).epsilon(1e-9));
    }
  }

  TEST_CASE("strong subadditivity on random tripartite states") {
    Rng rng(23);
    for (int t = 0; t < 25; ++t) {
      DensityOperator rho = random_density(8, rng);
      double cmi = conditional_mutual_information(rho.matrix(), {2, 2, 2}, {0}, {1}, {2});
      CHECK(cmi >= -1e-9);
    }
  }

  TEST_CASE("classical mutual information") {
    RMat indep(2, 2);
    indep << 0.12, 0.28, 0.18, 0.42;  // (0.3,0.7) x (0.4,0.6)
    CHECK(mutual_information_classical(indep) == doctest::Approx(0.0).epsilon(1e-12));
    RMat corr = RMat::Zero(2, 2);
    corr(0, 0) = corr(1, 1) = 0.5;
    CHECK(mutual_information_classical(corr) == doctest::Approx(1.0).epsilon(1e-12));
    RMat dsbs(2, 2);
    dsbs << 0.4, 0.1, 0.1, 0.4;
    CHECK(mutual_information_classical(dsbs) == doctest::Approx(kIDsbs).epsilon(1e-12));
  }

  TEST_CASE("apply_channel assembles the reference instance") {
    ExtendedState ext = apply_channel(reference_ensemble(), bsc(0.1));
    CHECK(ext.output[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ext.backward(0, 0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(ext.backward(1, 0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(ext.joint(0, 1) == doctest::Approx(0.05).epsilon(1e-12));
    // rho_y = 0.9 rho_y + 0.1 rho_{1-y}.
    Mat want = 0.9 * reference_ensemble().states[0].matrix() +
               0.1 * reference_ensemble().states[1].matrix();
    CHECK((ext.output_states[0] - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(mutual_information_classical(ext.joint) == doctest::Approx(kIxyRef).epsilon(1e-12));
    CHECK(holevo_information(ext.output_ensemble()) ==
          doctest::Approx(kIybRef).epsilon(1e-12));
  }

  TEST_CASE("simulation region of the reference instance") {
    RateRegion region = simulation_region(reference_ensemble(), bsc(0.1));
    CHECK(region.r_min == doctest::Approx(kRminRef).epsilon(1e-12));
    CHECK(region.sum_min == doctest::Approx(kSumMinRef).epsilon(1e-12));
    CHECK(region.contains({kRminRef, kSumMinRef - kRminRef}));
    CHECK(region.contains({kRminRef - 1e-12, kSumMinRef}));
    CHECK_FALSE(region.contains({kRminRef - 1e-3, 10.0}));
    CHECK_FALSE(region.contains({kRminRef + 1.0, kSumMinRef - kRminRef - 1.1}));
    // No side information: region degenerates to the classical one.
    Mat id = Mat::Identity(2, 2) / 2.0;
    Ensemble blank(Distribution::uniform(2), {DensityOperator(id), DensityOperator(id)});
    RateRegion cls = simulation_region(blank, bsc(0.1));
    CHECK(cls.r_min == doctest::Approx(kIxyRef).epsilon(1e-12));
    CHECK(cls.sum_min == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("fannes bound") {
    CHECK(fannes_bound(0.5, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fannes_bound(0.25, 4) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fannes_bound(0.0, 16) == doctest::Approx(0.0));
    CHECK(fannes_bound(0.1, 2) < fannes_bound(0.2, 2));
  }
}
