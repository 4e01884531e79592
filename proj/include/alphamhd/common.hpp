#pragma once
// Shared basics: aligned storage, error types, deterministic RNG, exact
// decimal formatting. Everything downstream assumes these semantics.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace alphamhd {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr double kPi = 3.14159265358979323846;

// One alignment class for every transform buffer so cached FFT plans apply
// to all of them.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t kAlign = 64;
  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    std::size_t bytes = (n * sizeof(T) + kAlign - 1) / kAlign * kAlign;
    void* p = std::aligned_alloc(kAlign, bytes ? bytes : kAlign);
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { std::free(p); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
  template <class U>
  bool operator!=(const AlignedAllocator<U>&) const noexcept {
    return false;
  }
};

template <class T>
using avector = std::vector<T, AlignedAllocator<T>>;

// shortest exact decimal; %.17g round-trips IEEE binary64
inline std::string format_g17(double x) {
  char b[48];
  std::snprintf(b, sizeof b, "%.17g", x);
  return std::string(b);
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised by the transform layer on non-finite input; the stepper converts it
// into a BlowUpError carrying the last good time.
struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a state loses finiteness; t is the last good time.
struct BlowUpError : std::runtime_error {
  double t;
  explicit BlowUpError(double t_)
      : std::runtime_error("solution lost finiteness at t = " + format_g17(t_)),
        t(t_) {}
};

// Deterministic stream: mt19937_64 is pinned by the standard, the double
// mapping and Box-Muller below are spelled out here so identical seeds give
// identical fields on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next_u64() { return gen_(); }
  // [0, 1), 53 mantissa bits
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double symmetric() { return 2.0 * uniform() - 1.0; }
  double gaussian() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  bool have_ = false;
  double spare_ = 0.0;
};

// FNV-1a, used for artifact manifests
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t double_bits(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof u);
  return u;
}

inline double bits_double(std::uint64_t u) {
  double x;
  std::memcpy(&x, &u, sizeof x);
  return x;
}

}  // namespace alphamhd
