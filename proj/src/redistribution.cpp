#include "chansim/redistribution.hpp"

#include <cmath>

#include "chansim/linalg.hpp"
#include "chansim/qinfo.hpp"
#include "chansim/random_states.hpp"

namespace chansim {

namespace {

enum Subsystem { kR = 0, kAHat = 1, kBHat = 2, kB = 3 };

double subsystem_entropy(const FourPartyPureState& psi, std::vector<int> keep) {
  return von_neumann_entropy_raw(partial_trace(psi.density(), psi.dims, keep));
}

}  // namespace

FourPartyPureState make_four_party(CVec amplitudes, std::vector<int> dims) {
  if (dims.size() != 4)
    throw ValidationError("four-party state: need exactly four dimensions");
  std::int64_t total = 1;
  for (int d : dims) {
    if (d < 1) throw ValidationError("four-party state: dimension < 1");
    total *= d;
    if (total > static_cast<std::int64_t>(kMatrixDimGuard))
      throw GuardExceeded("four-party state: total dimension exceeds guard");
  }
  if (amplitudes.size() != total)
    throw ValidationError("four-party state: amplitude count != dim product");
  double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > 1e-6)
    throw ValidationError("four-party state: amplitudes are not unit norm");
  FourPartyPureState psi;
  psi.amplitudes = amplitudes / norm;
  psi.dims = std::move(dims);
  return psi;
}

FourPartyPureState random_four_party(const std::vector<int>& dims, Rng& rng) {
  std::int64_t total = 1;
  for (int d : dims) total *= d;
  return make_four_party(random_ket(static_cast<int>(total), rng), dims);
}

OuterBound outer_bound(const FourPartyPureState& psi) {
  OuterBound bound;
  bound.q_min = 0.5 * conditional_mutual_information(psi.density(), psi.dims,
                                                     {kBHat}, {kR}, {kAHat});
  bound.qe_sum_min =
      subsystem_entropy(psi, {kBHat, kB}) - subsystem_entropy(psi, {kB});
  return bound;
}

QEPoint fqsw_corner(const FourPartyPureState& psi) {
  QEPoint pt;
  pt.q = 0.5 * mutual_information(psi.density(), psi.dims, {kBHat}, {kR, kAHat});
  pt.e = -0.5 * mutual_information(psi.density(), psi.dims, {kB}, {kBHat});
  pt.label = "fqsw";
  return pt;
}

QEPoint fqrs_corner(const FourPartyPureState& psi) {
  QEPoint pt;
  pt.q = 0.5 * mutual_information(psi.density(), psi.dims, {kBHat}, {kR, kB});
  pt.e = 0.5 * mutual_information(psi.density(), psi.dims, {kBHat}, {kAHat});
  pt.label = "fqrs";
  return pt;
}

QERegion region_report(const FourPartyPureState& psi) {
  QERegion region;
  region.bound = outer_bound(psi);
  region.corners = {fqsw_corner(psi), fqrs_corner(psi)};
  region.a_hat_trivial = psi.dims[kAHat] == 1;
  region.b_trivial = psi.dims[kB] == 1;
  auto on_both_lines = [&](const QEPoint& pt) {
    return std::abs(pt.q - region.bound.q_min) <= 1e-9 &&
           std::abs(pt.q + pt.e - region.bound.qe_sum_min) <= 1e-9;
  };
  region.fqsw_tight = region.a_hat_trivial && on_both_lines(region.corners[0]);
  region.fqrs_tight = region.b_trivial && on_both_lines(region.corners[1]);
  return region;
}

}  // namespace chansim
