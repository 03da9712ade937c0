#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace chansim {

using Real = double;
using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
// Sequences over a finite alphabet; tables hold one sequence per row.
using Seq = Eigen::VectorXi;
using SeqTable = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Malformed inputs (negative probabilities, non-hermitian operators, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested computation exceeds the enumeration / matrix-size guards.
struct GuardExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A well-formed optimization instance with an empty feasible set.
struct InfeasibleInstance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Enumeration guards, chosen so every supported computation fits in desk-scale
// memory and minutes of CPU.
inline constexpr std::uint64_t kEnumerationGuard = std::uint64_t{1} << 24;
inline constexpr std::uint64_t kAccumulationGuard = std::uint64_t{1} << 26;
inline constexpr std::uint64_t kMatrixDimGuard = std::uint64_t{1} << 13;

inline std::uint64_t checked_pow(std::uint64_t base, int exp, std::uint64_t guard,
                                 const char* what) {
  std::uint64_t v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > guard / base)
      throw GuardExceeded(std::string(what) + ": " + std::to_string(base) + "^" +
                          std::to_string(exp) + " exceeds guard");
    v *= base;
  }
  if (v > guard)
    throw GuardExceeded(std::string(what) + " exceeds guard");
  return v;
}

inline int default_thread_count() {
  if (const char* env = std::getenv("CHANSIM_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, count) on `threads` workers.  Work items must be
// independent; determinism comes from writing into pre-assigned slots.
template <class Fn>
void parallel_for(std::int64_t count, Fn&& fn, int threads = 0) {
  if (threads <= 0) threads = default_thread_count();
  if (threads == 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  int workers = static_cast<int>(std::min<std::int64_t>(threads, count));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      while (true) {
        std::int64_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace chansim
