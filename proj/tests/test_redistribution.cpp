#include <cmath>

#include "chansim/redistribution.hpp"
#include "chansim/rng.hpp"
#include "doctest.h"

using namespace chansim;

namespace {

FourPartyPureState bell_r_bhat() {
  CVec amp = CVec::Zero(4);  // R (x) B_hat, A_hat = B = trivial
  amp[0] = amp[3] = 1 / std::sqrt(2.0);
  return make_four_party(amp, {2, 1, 2, 1});
}

FourPartyPureState bell_bhat_b() {
  CVec amp = CVec::Zero(4);  // B_hat (x) B
  amp[0] = amp[3] = 1 / std::sqrt(2.0);
  return make_four_party(amp, {1, 1, 2, 2});
}

FourPartyPureState ghz_r_bhat_b() {
  CVec amp = CVec::Zero(8);
  amp[0] = amp[7] = 1 / std::sqrt(2.0);
  return make_four_party(amp, {2, 1, 2, 2});
}

}  // namespace

TEST_SUITE("redistribution") {
  TEST_CASE("validation and renormalization") {
    CVec amp = CVec::Zero(4);
    amp[0] = 1.0 + 5e-7;  // tiny norm slack is repaired
    FourPartyPureState psi = make_four_party(amp, {2, 1, 2, 1});
    CHECK(std::abs(psi.amplitudes.norm() - 1.0) < 1e-12);
    CVec bad = CVec::Zero(4);
    bad[0] = 0.5;
    CHECK_THROWS_AS(make_four_party(bad, {2, 1, 2, 1}), ValidationError);
    CHECK_THROWS_AS(make_four_party(CVec::Ones(3), {2, 1, 2, 1}), ValidationError);
    CHECK_THROWS_AS(make_four_party(CVec::Ones(4), {2, 2}), ValidationError);
  }

  TEST_CASE("moving one half of an ebit costs one qubit") {
    FourPartyPureState psi = bell_r_bhat();
    OuterBound bound = outer_bound(psi);
    CHECK(bound.q_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bound.qe_sum_min == doctest::Approx(1.0).epsilon(1e-12));
    QEPoint sw = fqsw_corner(psi);
    CHECK(sw.q == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sw.e == doctest::Approx(0.0).epsilon(1e-12));
    QERegion region = region_report(psi);
    CHECK(region.a_hat_trivial);
    CHECK(region.b_trivial);
    CHECK(region.fqsw_tight);
    CHECK(region.fqrs_tight);
  }

  TEST_CASE("pre-shared ebit is harvested for free") {
    FourPartyPureState psi = bell_bhat_b();
    OuterBound bound = outer_bound(psi);
    CHECK(bound.q_min == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(bound.qe_sum_min == doctest::Approx(-1.0).epsilon(1e-12));
    QEPoint sw = fqsw_corner(psi);
    CHECK(sw.q == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sw.e == doctest::Approx(-1.0).epsilon(1e-12));
  }

  TEST_CASE("classical ghz correlations cost half a qubit") {
    FourPartyPureState psi = ghz_r_bhat_b();
    OuterBound bound = outer_bound(psi);
    CHECK(bound.q_min == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(bound.qe_sum_min == doctest::Approx(0.0).epsilon(1e-12));
    QEPoint sw = fqsw_corner(psi);
    CHECK(sw.q == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sw.e == doctest::Approx(-0.5).epsilon(1e-12));
    QERegion region = region_report(psi);
    CHECK(region.a_hat_trivial);
    CHECK(region.fqsw_tight);
    CHECK_FALSE(region.b_trivial);
  }

  TEST_CASE("product states need nothing") {
    CVec amp = CVec::Zero(16);
    amp[0] = 1.0;
    FourPartyPureState psi = make_four_party(amp, {2, 2, 2, 2});
    OuterBound bound = outer_bound(psi);
    CHECK(bound.q_min == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(bound.qe_sum_min == doctest::Approx(0.0).epsilon(1e-10));
    QEPoint sw = fqsw_corner(psi);
    QEPoint rs = fqrs_corner(psi);
    CHECK(sw.q == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(rs.q == doctest::Approx(0.0).epsilon(1e-10));
  }

  TEST_CASE("fqsw corner sits on the sum line for every pure state") {
    Rng rng(137);
    for (int t = 0; t < 50; ++t) {
      FourPartyPureState psi = random_four_party({2, 2, 2, 2}, rng);
      OuterBound bound = outer_bound(psi);
      QEPoint sw = fqsw_corner(psi);
      // Purity makes (1/2)I(Bh;RA) - (1/2)I(B;Bh) collapse to H(Bh B) - H(B).
      CHECK(sw.q + sw.e == doctest::Approx(bound.qe_sum_min).epsilon(1e-9));
    }
  }

  TEST_CASE("corners satisfy the outer bound on random states") {
    Rng rng(139);
    for (int t = 0; t < 50; ++t) {
      FourPartyPureState psi = random_four_party({2, 2, 2, 2}, rng);
      QERegion region = region_report(psi);
      REQUIRE(region.corners.size() == 2);
      CHECK(region.corners[0].label == "fqsw");
      CHECK(region.corners[1].label == "fqrs");
      for (const QEPoint& pt : region.corners) CHECK(region.contains(pt));
      CHECK(region.bound.q_min >= -1e-9);  // strong subadditivity
    }
  }

  TEST_CASE("unbalanced dimensions stay consistent") {
    Rng rng(149);
    for (std::vector<int> dims :
         {std::vector<int>{2, 3, 2, 1}, {1, 2, 3, 2}, {3, 1, 2, 2}}) {
      FourPartyPureState psi = random_four_party(dims, rng);
      QERegion region = region_report(psi);
      for (const QEPoint& pt : region.corners) CHECK(region.contains(pt));
      CHECK(region.a_hat_trivial == (dims[1] == 1));
      CHECK(region.b_trivial == (dims[3] == 1));
      if (region.a_hat_trivial) {
        CHECK(region.fqsw_tight);
        CHECK(region.corners[0].q == doctest::Approx(region.bound.q_min).epsilon(1e-9));
      }
      if (region.b_trivial) {
        CHECK(region.fqrs_tight);
        CHECK(region.corners[1].q == doctest::Approx(region.bound.q_min).epsilon(1e-9));
      }
    }
  }
}
