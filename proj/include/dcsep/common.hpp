#ifndef DCSEP_COMMON_HPP
#define DCSEP_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcsep {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

inline bool all_finite(const Mat& m) { return m.allFinite(); }

// splitmix64; used to derive independent seed streams from a master seed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = 0x51a7b3c9d1e5f2a7ULL;
  for (std::uint64_t p : parts) s = mix64(s ^ mix64(p));
  return s;
}

// Deterministic RNG. The raw engine is std::mt19937_64 but all distributions
// are produced here so the sample sequence does not depend on the standard
// library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  int uniform_int(int n) {
    require(n > 0, "uniform_int: n must be positive");
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  // Box-Muller with cached second sample.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Rng fork(std::uint64_t salt) { return Rng(mix_seed({next_u64(), salt})); }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Fisher-Yates with our own index draws, so shuffles are reproducible across
// standard library implementations.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)));
    std::swap(v[i - 1], v[j]);
  }
}

// TF-bin flattening convention used across the library: bin i = t * F + f.
inline long tf_index(long t, long f, long F) { return t * F + f; }

// T x F matrix -> length T*F vector, row-major over (t, f).
inline Vec tf_flatten(const Mat& m) {
  Vec out(m.rows() * m.cols());
  for (long t = 0; t < m.rows(); ++t)
    for (long f = 0; f < m.cols(); ++f) out[t * m.cols() + f] = m(t, f);
  return out;
}

inline Mat tf_unflatten(const Vec& v, long T, long F) {
  require(v.size() == T * F, "tf_unflatten: size mismatch");
  Mat out(T, F);
  for (long t = 0; t < T; ++t)
    for (long f = 0; f < F; ++f) out(t, f) = v[t * F + f];
  return out;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

namespace io {

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

inline void read_bytes(std::istream& is, void* p, std::size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  require(static_cast<std::size_t>(is.gcount()) == n, "unexpected end of file");
}

inline void write_u32(std::ostream& os, std::uint32_t v) { write_bytes(os, &v, 4); }
inline void write_u64(std::ostream& os, std::uint64_t v) { write_bytes(os, &v, 8); }
inline void write_f64(std::ostream& os, double v) { write_bytes(os, &v, 8); }

inline std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  read_bytes(is, &v, 4);
  return v;
}

inline std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  read_bytes(is, &v, 8);
  return v;
}

inline double read_f64(std::istream& is) {
  double v = 0;
  read_bytes(is, &v, 8);
  return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  write_bytes(os, s.data(), s.size());
}

inline std::string read_string(std::istream& is) {
  std::uint32_t n = read_u32(is);
  std::string s(n, '\0');
  if (n) read_bytes(is, s.data(), n);
  return s;
}

}  // namespace io

}  // namespace dcsep

#endif  // DCSEP_COMMON_HPP
