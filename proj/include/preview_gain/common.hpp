#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace preview_gain {

/// Raised when a hypothesis or feasibility condition fails (e.g. the gain
/// bound is too small for the data). Distinct from plain input errors so
/// callers can map it to a dedicated exit code.
struct FeasibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver exhausts its budget.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numeric defaults shared across the library. All thresholds that gate a
/// strict inequality are scale-free unless stated otherwise.
struct Tolerances {
  double sym_rel = 1e-9;        // relative symmetry tolerance before symmetrization
  double pd_margin_rel = 1e-10; // strict PD: lambda_min > pd_margin_rel * lambda_max
  double rcond_min = 1e-12;     // invertibility proxy: sigma_min/sigma_max
  double eps_gram = 1e-12;      // absolute margin on Gramian minima
};

inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("PREVIEW_GAIN_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0 && static_cast<unsigned>(cap) < hw) {
      hw = static_cast<unsigned>(cap);
    }
  }
  return hw;
}

/// Runs fn(i) for i in [0, count). Work is pulled from a shared counter so
/// results must be written to per-index slots by the callable itself.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  unsigned workers = thread_budget();
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  if (workers > count) workers = static_cast<unsigned>(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (unsigned k = 0; k < workers; ++k) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// FNV-1a, used to stamp output files with a config fingerprint instead of
/// timestamps so reruns are byte-identical.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace preview_gain
