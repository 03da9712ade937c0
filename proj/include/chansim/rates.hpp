#pragma once

#include "chansim/protocol.hpp"

namespace chansim {

// Single-letter distortion d(x, xhat) >= 0, extended additively to blocks as
// the per-symbol average.
class DistortionMeasure {
 public:
  explicit DistortionMeasure(RMat table);

  const RMat& table() const { return m_; }
  double operator()(int x, int xh) const { return m_(x, xh); }
  int num_sources() const { return static_cast<int>(m_.rows()); }
  int num_reconstructions() const { return static_cast<int>(m_.cols()); }
  double max_entry() const { return m_.maxCoeff(); }

 private:
  RMat m_;
};

struct SearchBudget {
  int starts = 16;
  int iterations = 400;
  std::uint64_t seed = 1;
  bool certify = false;  // exhaustive simplex-grid check, binary sources only
  double grid_resolution = 0.02;
  double penalty = 1e4;  // exterior penalty weight on the active constraint
  int threads = 0;
};

struct CurvePoint {
  double abscissa = 0.0;  // the rate budget R or the distortion budget d
  double ordinate = 0.0;  // the optimized value at that budget
  RMat channel;           // test channel W(y|x) with |Y| = |X| + 1
  std::vector<std::vector<int>> decoder;  // decoder[y][z] = xhat (Wyner-Ziv)
  double constraint_slack = 0.0;          // >= 0 on every returned point
  double certificate = 0.0;      // best feasible grid value, when certified
  double certificate_gap = 0.0;  // optimizer minus grid, signed so >= 0 is "won"
  bool certified = false;
};

// Distillable common-randomness at communication budget r: maximizes I(Y;B)
// over test channels subject to I(X;Y) - I(Y;B) <= r, by multi-start
// projected local search with exterior penalty and feasibility restoration.
CurvePoint cr_distillation(const Ensemble& e, double r,
                           const SearchBudget& budget,
                           const RMat* warm_start = nullptr);

// Rate with decoder side information: minimizes I(X;Y) - I(Y;Z) over test
// channels, the deterministic decoder set to the per-(y,z) expected-distortion
// argmin, subject to mean distortion <= d.  joint_xz(x, z) is the source/side
// information law.  Throws InfeasibleInstance when d is below the floor
// sum_x p(x) min_xh d(x, xh).
CurvePoint wyner_ziv_rate(const RMat& joint_xz, const DistortionMeasure& dist,
                          double d, const SearchBudget& budget,
                          const RMat* warm_start = nullptr);

// Curve sweeps over an ascending budget grid; each point warm-starts from its
// predecessor, which makes the computed curves monotone by construction.
std::vector<CurvePoint> cr_curve(const Ensemble& e,
                                 const std::vector<double>& grid,
                                 const SearchBudget& budget);
std::vector<CurvePoint> wyner_ziv_curve(const RMat& joint_xz,
                                        const DistortionMeasure& dist,
                                        const std::vector<double>& grid,
                                        const SearchBudget& budget);

// Per-symbol reconstruction map: for each channel output y, a POVM over
// reconstruction labels acting on one side-information copy.  A classical
// table decoder places the identity on its chosen label.
struct SymbolDecoder {
  std::vector<std::vector<Mat>> elements;  // elements[y][xhat]

  static SymbolDecoder from_table(const std::vector<int>& y_to_xhat, int dim,
                                  int num_xhat);
};

struct RdCodeReport {
  std::vector<double> distortion_per_l;  // Monte Carlo mean per fixed l
  int best_l = 0;
  double best_distortion = 0.0;
  double average_distortion = 0.0;  // uniform mixture over l
  int trials = 0;                   // per l
};

// Runs the simulation code with the common-randomness index pinned to each l
// in turn and evaluates the per-symbol reconstruction distortion on Bob's
// outputs and post-measurement side information.
RdCodeReport rd_code_from_simulation(const SimulationCode& code,
                                     const DistortionMeasure& dist,
                                     const SymbolDecoder& dec, int trials,
                                     Rng& rng);

}  // namespace chansim
