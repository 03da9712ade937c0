#include "chansim/qinfo.hpp"

#include <cmath>

#include "chansim/linalg.hpp"

namespace chansim {

namespace {
constexpr double kEigClamp = 1e-12;

double entropy_terms(const RVec& vals) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals[i] > kEigClamp) h -= vals[i] * std::log2(vals[i]);
  return h;
}
}  // namespace

double shannon_entropy_raw(const RVec& p) { return entropy_terms(p); }

double shannon_entropy(const Distribution& p) { return entropy_terms(p.probs()); }

double von_neumann_entropy_raw(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(rho), Eigen::EigenvaluesOnly);
  return entropy_terms(es.eigenvalues());
}

double von_neumann_entropy(const DensityOperator& rho) {
  return von_neumann_entropy_raw(rho.matrix());
}

DensityOperator embed_cq(const Ensemble& e) {
  const int d = e.dim();
  Mat out = Mat::Zero(e.size() * d, e.size() * d);
  for (int x = 0; x < e.size(); ++x)
    out.block(x * d, x * d, d, d) = e.prior[x] * e.states[x].matrix();
  return DensityOperator(out);
}

double holevo_information(const Ensemble& e) {
  double h_avg = von_neumann_entropy_raw(e.average());
  double avg_h = 0.0;
  for (int x = 0; x < e.size(); ++x)
    avg_h += e.prior[x] * von_neumann_entropy_raw(e.states[x].matrix());
  return h_avg - avg_h;
}

namespace {
double subsystem_entropy(const Mat& rho, const std::vector<int>& dims,
                         std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  if (keep.size() == dims.size()) return von_neumann_entropy_raw(rho);
  return von_neumann_entropy_raw(partial_trace(rho, dims, keep));
}

std::vector<int> join(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}
}  // namespace

double mutual_information(const Mat& rho, const std::vector<int>& dims,
                          const std::vector<int>& a, const std::vector<int>& b) {
  return subsystem_entropy(rho, dims, a) + subsystem_entropy(rho, dims, b) -
         subsystem_entropy(rho, dims, join(a, b));
}

double conditional_mutual_information(const Mat& rho, const std::vector<int>& dims,
                                      const std::vector<int>& a,
                                      const std::vector<int>& b,
                                      const std::vector<int>& c) {
  return subsystem_entropy(rho, dims, join(a, c)) +
         subsystem_entropy(rho, dims, join(b, c)) -
         subsystem_entropy(rho, dims, join(join(a, b), c)) -
         subsystem_entropy(rho, dims, c);
}

double mutual_information_classical(const RMat& joint) {
  RVec px = joint.rowwise().sum();
  RVec py = joint.colwise().sum();
  double mi = 0.0;
  for (Eigen::Index x = 0; x < joint.rows(); ++x)
    for (Eigen::Index y = 0; y < joint.cols(); ++y)
      if (joint(x, y) > kEigClamp)
        mi += joint(x, y) * std::log2(joint(x, y) / (px[x] * py[y]));
  return mi;
}

ExtendedState apply_channel(const Ensemble& e, const Channel& w) {
  if (w.num_inputs() != e.size())
    throw ValidationError("apply_channel: channel input size mismatch");
  const int nx = e.size();
  const int ny = w.num_outputs();
  RMat joint(nx, ny);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) joint(x, y) = e.prior[x] * w(x, y);
  RVec q = joint.colwise().sum();

  RMat backward(ny, nx);
  std::vector<Mat> out_states(ny);
  const int d = e.dim();
  for (int y = 0; y < ny; ++y) {
    if (q[y] > kEigClamp) {
      backward.row(y) = joint.col(y).transpose() / q[y];
    } else {
      backward.row(y).setConstant(1.0 / nx);
    }
    Mat rho_y = Mat::Zero(d, d);
    for (int x = 0; x < nx; ++x)
      rho_y += backward(y, x) * e.states[x].matrix();
    out_states[y] = rho_y;
  }
  double qsum = q.sum();
  return ExtendedState{e, w, joint, Distribution(q / qsum), backward, out_states};
}

RateRegion simulation_region(const ExtendedState& ext) {
  double ixy = mutual_information_classical(ext.joint);
  // I(Y;B) is the Holevo quantity of the receiver's induced ensemble, and
  // H(Y|B) = H(q) + sum_y q(y) H(rho_y) - H(rho_bar) via the cq identity.
  double h_bar = von_neumann_entropy_raw(ext.source.average());
  double avg_h = 0.0;
  for (int y = 0; y < ext.output.size(); ++y)
    avg_h += ext.output[y] * von_neumann_entropy_raw(ext.output_states[y]);
  double iyb = h_bar - avg_h;
  double h_y_given_b = shannon_entropy(ext.output) + avg_h - h_bar;
  return RateRegion{ixy - iyb, h_y_given_b};
}

RateRegion simulation_region(const Ensemble& e, const Channel& w) {
  return simulation_region(apply_channel(e, w));
}

double fannes_bound(double eps, double dim) {
  if (eps < 0 || dim < 1) throw ValidationError("fannes_bound: bad arguments");
  double tau = eps <= 0.25 ? (eps > 0 ? -eps * std::log2(eps) : 0.0) : 0.5;
  return eps * std::log2(dim) + tau;
}

}  // namespace chansim
