#ifndef DCSEP_SIGNAL_HPP
#define DCSEP_SIGNAL_HPP

#include <algorithm>
#include <complex>
#include <vector>

#include "dcsep/common.hpp"

namespace dcsep::signal {

enum class WindowKind { sine };

struct SignalConfig {
  int sample_rate = 8000;
  int window_len = 256;  // 32 ms at 8 kHz
  int hop = 64;          // 8 ms shift
  WindowKind window_kind = WindowKind::sine;

  int bins() const { return window_len / 2 + 1; }

  void validate() const {
    require(sample_rate > 0, "SignalConfig: sample_rate must be positive");
    require(hop > 0, "SignalConfig: hop must be positive");
    // The sine window reconstructs exactly only at 75% overlap.
    require(window_len == 4 * hop, "SignalConfig: window_len must equal 4*hop");
  }
};

struct Spectrogram {
  CMat values;  // T x F
  long frames() const { return values.rows(); }
  long bins() const { return values.cols(); }
};

enum class NormState { raw, global_mvn, sequence_mvn };

struct FeatureMatrix {
  Mat values;  // T x F
  NormState normalization_state = NormState::raw;
};

struct BinWeights {
  Mat values;  // T x F, 0/1 for silence weighting, [0, inf) in general
  bool all_silent = false;
};

struct GlobalStats {
  Vec mean;  // per frequency bin
  Vec std;   // per frequency bin, floored
};

// w[n] = sin(pi*(n+0.5)/L); squared copies at 75% overlap sum to the
// constant 2, which istft divides out.
inline Vec sine_window(int len) {
  Vec w(len);
  for (int n = 0; n < len; ++n) w[n] = std::sin(M_PI * (n + 0.5) / len);
  return w;
}

namespace detail {

// Iterative radix-2 FFT; direct DFT fallback for non power-of-two sizes.
inline bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (!is_pow2(n)) {
    std::vector<std::complex<double>> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> acc(0.0, 0.0);
      for (std::size_t t = 0; t < n; ++t)
        acc += a[t] * std::polar(1.0, sign * 2.0 * M_PI * double(k * t % n) / double(n));
      out[k] = acc;
    }
    a = std::move(out);
    if (inverse)
      for (auto& v : a) v /= static_cast<double>(n);
    return;
  }
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::complex<double> wlen = std::polar(1.0, ang);
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& v : a) v /= static_cast<double>(n);
}

}  // namespace detail

inline Spectrogram stft(const Vec& waveform, const SignalConfig& cfg) {
  cfg.validate();
  const long len = waveform.size();
  const int L = cfg.window_len;
  require(len >= L, "input too short");
  const long T = (len - L) / cfg.hop + 1;
  const int F = cfg.bins();
  const Vec w = sine_window(L);

  Spectrogram spec;
  spec.values.resize(T, F);
  std::vector<std::complex<double>> buf(L);
  for (long t = 0; t < T; ++t) {
    const long off = t * cfg.hop;
    for (int n = 0; n < L; ++n) buf[n] = {waveform[off + n] * w[n], 0.0};
    detail::fft_inplace(buf, false);
    for (int f = 0; f < F; ++f) spec.values(t, f) = buf[f];
  }
  return spec;
}

inline Vec istft(const Spectrogram& spec, const SignalConfig& cfg) {
  cfg.validate();
  const int L = cfg.window_len;
  require(spec.bins() == cfg.bins(), "istft: spectrogram bins inconsistent with config");
  require(spec.frames() >= 1, "istft: empty spectrogram");
  const long T = spec.frames();
  const Vec w = sine_window(L);
  const long out_len = (T - 1) * cfg.hop + L;
  // Constant squared-window overlap sum at 75% overlap.
  const double ola_norm = 2.0;

  Vec out = Vec::Zero(out_len);
  std::vector<std::complex<double>> buf(L);
  for (long t = 0; t < T; ++t) {
    for (int f = 0; f < cfg.bins(); ++f) buf[f] = spec.values(t, f);
    for (int f = cfg.bins(); f < L; ++f) buf[f] = std::conj(spec.values(t, L - f));
    detail::fft_inplace(buf, true);
    const long off = t * cfg.hop;
    for (int n = 0; n < L; ++n) out[off + n] += buf[n].real() * w[n] / ola_norm;
  }
  return out;
}

inline FeatureMatrix log_magnitude(const Spectrogram& spec, double floor = 1e-7) {
  require(floor > 0, "log_magnitude: floor must be positive");
  FeatureMatrix fm;
  fm.values = spec.values.cwiseAbs().cwiseMax(floor).array().log().matrix();
  fm.normalization_state = NormState::raw;
  return fm;
}

inline GlobalStats fit_global_stats(const std::vector<FeatureMatrix>& features) {
  require(!features.empty(), "fit_global_stats: empty feature set");
  const long F = features.front().values.cols();
  Vec sum = Vec::Zero(F);
  Vec sumsq = Vec::Zero(F);
  double n = 0;
  for (const auto& fm : features) {
    require(fm.values.cols() == F, "fit_global_stats: inconsistent bin counts");
    sum += fm.values.colwise().sum().transpose();
    sumsq += fm.values.array().square().matrix().colwise().sum().transpose();
    n += static_cast<double>(fm.values.rows());
  }
  require(n > 0, "fit_global_stats: no frames");
  GlobalStats st;
  st.mean = sum / n;
  Vec var = (sumsq / n - st.mean.array().square().matrix()).cwiseMax(0.0);
  st.std = var.array().sqrt().cwiseMax(1e-8).matrix();
  return st;
}

inline FeatureMatrix apply_global_mvn(const FeatureMatrix& fm, const GlobalStats& st) {
  require(fm.values.cols() == st.mean.size(), "apply_global_mvn: bin count mismatch");
  FeatureMatrix out;
  out.values = (fm.values.rowwise() - st.mean.transpose()).array().rowwise() /
               st.std.transpose().array();
  out.normalization_state = NormState::global_mvn;
  return out;
}

// w = 0 iff 20*log10(|x| / max|x|) < threshold_db; all-zero input yields
// all-zero weights with the all_silent flag set.
inline BinWeights silence_weights(const Mat& magnitudes, double threshold_db = -40.0) {
  require(threshold_db < 0, "silence_weights: threshold must be negative dB");
  BinWeights bw;
  const double peak = magnitudes.maxCoeff();
  if (peak <= 0.0) {
    bw.values = Mat::Zero(magnitudes.rows(), magnitudes.cols());
    bw.all_silent = true;
    return bw;
  }
  const double lin = peak * std::pow(10.0, threshold_db / 20.0);
  bw.values = (magnitudes.array() >= lin).cast<double>().matrix();
  bw.all_silent = false;
  return bw;
}

// Elementwise product; the mixture phase is reused unchanged.
inline Spectrogram apply_mask(const Spectrogram& mixture, const Mat& mask) {
  require(mask.rows() == mixture.frames() && mask.cols() == mixture.bins(),
          "apply_mask: dimension mismatch");
  Spectrogram out;
  out.values = mixture.values.cwiseProduct(mask.cast<std::complex<double>>());
  return out;
}

// GlobalStats persistence: magic, version, F, mean[], std[].
constexpr std::uint32_t kStatsMagic = 0x44434753;  // "DCGS"
constexpr std::uint32_t kStatsVersion = 1;

inline void save_stats(const std::string& path, const GlobalStats& st) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "save_stats: cannot open " + path);
  io::write_u32(os, kStatsMagic);
  io::write_u32(os, kStatsVersion);
  io::write_u32(os, static_cast<std::uint32_t>(st.mean.size()));
  for (long i = 0; i < st.mean.size(); ++i) io::write_f64(os, st.mean[i]);
  for (long i = 0; i < st.std.size(); ++i) io::write_f64(os, st.std[i]);
  require(os.good(), "save_stats: write failed");
}

inline GlobalStats load_stats(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "load_stats: cannot open " + path);
  require(io::read_u32(is) == kStatsMagic, "load_stats: bad magic");
  require(io::read_u32(is) == kStatsVersion, "load_stats: unsupported version");
  const std::uint32_t F = io::read_u32(is);
  GlobalStats st;
  st.mean.resize(F);
  st.std.resize(F);
  for (std::uint32_t i = 0; i < F; ++i) st.mean[i] = io::read_f64(is);
  for (std::uint32_t i = 0; i < F; ++i) st.std[i] = io::read_f64(is);
  return st;
}

}  // namespace dcsep::signal

#endif  // DCSEP_SIGNAL_HPP
