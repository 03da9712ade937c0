#include "chansim/linalg.hpp"

#include <numeric>

namespace chansim {

Mat partial_trace(const Mat& rho, const std::vector<int>& dims,
                  const std::vector<int>& keep) {
  const int k = static_cast<int>(dims.size());
  Eigen::Index total = 1;
  for (int d : dims) {
    if (d <= 0) throw ValidationError("partial_trace: nonpositive dimension");
    total *= d;
  }
  if (rho.rows() != total || rho.cols() != total)
    throw ValidationError("partial_trace: operator size does not match dims");
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= k)
      throw ValidationError("partial_trace: keep index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw ValidationError("partial_trace: keep indices must be increasing");
  }

  std::vector<int> traced;
  for (int i = 0; i < k; ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) traced.push_back(i);

  std::vector<Eigen::Index> stride(k);
  Eigen::Index s = 1;
  for (int i = k - 1; i >= 0; --i) {
    stride[i] = s;
    s *= dims[i];
  }

  // Offset tables: every keep-index / traced-index tuple maps to a flat offset.
  auto offsets = [&](const std::vector<int>& subs) {
    Eigen::Index count = 1;
    for (int i : subs) count *= dims[i];
    std::vector<Eigen::Index> off(count, 0);
    Eigen::Index reps = 1;
    for (int i : subs) {
      Eigen::Index block = count / (reps * dims[i]);
      Eigen::Index idx = 0;
      for (Eigen::Index r = 0; r < reps; ++r)
        for (int v = 0; v < dims[i]; ++v)
          for (Eigen::Index b = 0; b < block; ++b) off[idx++] += v * stride[i];
      reps *= dims[i];
    }
    return off;
  };
  std::vector<Eigen::Index> keep_off = offsets(keep);
  std::vector<Eigen::Index> tr_off = offsets(traced);

  const Eigen::Index dk = static_cast<Eigen::Index>(keep_off.size());
  Mat out = Mat::Zero(dk, dk);
  for (Eigen::Index r = 0; r < dk; ++r)
    for (Eigen::Index c = 0; c < dk; ++c) {
      Cplx acc = 0;
      for (Eigen::Index t : tr_off) acc += rho(keep_off[r] + t, keep_off[c] + t);
      out(r, c) = acc;
    }
  return out;
}

Mat hermitian_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
  RVec vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

Mat pinv_sqrt(const Mat& a, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
  const RVec& vals = es.eigenvalues();
  double cutoff = vals.cwiseAbs().maxCoeff() * rel_tol;
  RVec inv = RVec::Zero(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals[i] > cutoff) inv[i] = 1.0 / std::sqrt(vals[i]);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

double trace_norm_hermitian(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace chansim
