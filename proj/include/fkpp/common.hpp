#pragma once

#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkpp {

/// Formats a double with 17 significant digits — enough to round-trip the
/// exact bit pattern, so emitted files are byte-stable across runs.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Thrown for invalid arguments and violated preconditions; the CLI maps it
/// to exit code 2 (configuration error).
class InvalidArgument : public std::runtime_error {
 public:
  explicit InvalidArgument(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a run aborts mid-flight (boundary guard, lost contraction).
class RunAborted : public std::runtime_error {
 public:
  explicit RunAborted(const std::string& what) : std::runtime_error(what) {}
};

/// Allocator with 64-byte alignment so FFT plans created on aligned buffers
/// stay valid for every buffer we hand them.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t kAlign = 64;

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    std::size_t bytes = ((n * sizeof(T) + kAlign - 1) / kAlign) * kAlign;
    void* p = std::aligned_alloc(kAlign, bytes);
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
  template <class U>
  bool operator!=(const AlignedAllocator<U>&) const { return false; }
};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

/// One verification outcome: a named statistic compared against a tolerance.
/// Everything the CLI reports funnels through this shape.
struct CheckResult {
  std::string name;
  double stat = 0.0;
  double tol = 0.0;
  bool pass = false;
};

inline CheckResult make_check(std::string name, double stat, double tol,
                              bool pass) {
  return CheckResult{std::move(name), stat, tol, pass};
}

/// Check that passes when |stat| <= tol.
inline CheckResult check_leq(std::string name, double stat, double tol) {
  bool ok = stat <= tol;
  return CheckResult{std::move(name), stat, tol, ok};
}

inline bool all_pass(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace fkpp
