#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "gclab/errors.hpp"
#include "gclab/frames.hpp"
#include "gclab/series.hpp"

namespace gclab {

enum class FilterKind : int { fir = 0, savitzky_golay = 1, wiener = 2, wavelet = 3 };

inline const char* filter_name(FilterKind k) {
  switch (k) {
    case FilterKind::fir: return "fir";
    case FilterKind::savitzky_golay: return "sg";
    case FilterKind::wiener: return "wiener";
    default: return "wavelet";
  }
}

/// Baseline denoiser configuration. All filters process each axis
/// independently and keep length and sample rate (reflection padding).
struct FilterConfig {
  FilterKind kind = FilterKind::fir;
  int fir_taps = 101;
  double fir_cutoff_hz = 0.0;  // <= 0 selects 0.05 * Nyquist
  int sg_window = 51;
  int sg_order = 3;
  int wiener_segment = 0;            // 0 derives 8 half-overlapping segments
  double wiener_noise_power = -1.0;  // < 0 estimates from the top-octave floor
  int wavelet_levels = 4;
  double wavelet_threshold_scale = 1.0;  // 0 disables soft thresholding

  void validate(double sample_rate) const {
    switch (kind) {
      case FilterKind::fir:
        if (fir_taps < 3 || fir_taps % 2 == 0)
          throw config_error("filter: fir_taps must be odd and >= 3");
        if (fir_cutoff_hz > 0.0 && !(fir_cutoff_hz < sample_rate / 2.0))
          throw config_error("filter: fir_cutoff must be below Nyquist");
        break;
      case FilterKind::savitzky_golay:
        if (sg_window < 3 || sg_window % 2 == 0)
          throw config_error("filter: sg_window must be odd and >= 3");
        if (!(sg_order >= 0 && sg_order < sg_window))
          throw config_error("filter: need 0 <= sg_order < sg_window");
        break;
      case FilterKind::wiener:
        if (wiener_segment != 0 && (wiener_segment < 8 || wiener_segment % 2 != 0))
          throw config_error("filter: wiener_segment must be even and >= 8 (or 0 for auto)");
        break;
      case FilterKind::wavelet:
        if (wavelet_levels < 1) throw config_error("filter: wavelet_levels must be >= 1");
        if (wavelet_threshold_scale < 0.0)
          throw config_error("filter: wavelet_threshold_scale must be >= 0");
        break;
    }
  }
};

namespace detail {

/// Symmetric reflection without edge duplication: ... x2 x1 | x0 x1 ...
inline std::size_t reflect_index(long long i, long long n) {
  if (n == 1) return 0;
  const long long period = 2 * (n - 1);
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - m;
  return static_cast<std::size_t>(m);
}

/// Centered convolution with reflection padding; output length == input.
inline std::vector<double> convolve_centered(const std::vector<double>& x,
                                             const std::vector<double>& h) {
  const long long n = static_cast<long long>(x.size());
  const long long t = static_cast<long long>(h.size());
  const long long c = (t - 1) / 2;
  std::vector<double> y(x.size());
  for (long long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long long k = 0; k < t; ++k) acc += h[k] * x[reflect_index(i + k - c, n)];
    y[i] = acc;
  }
  return y;
}

inline std::vector<double> fir_lowpass_taps(int taps, double cutoff_hz, double fs) {
  const double fc = (cutoff_hz > 0.0) ? cutoff_hz : 0.05 * (fs / 2.0);
  const int c = (taps - 1) / 2;
  std::vector<double> h(taps);
  const double two_fc = 2.0 * fc / fs;
  double sum = 0.0;
  for (int k = 0; k < taps; ++k) {
    const double m = k - c;
    const double x = pi * two_fc * m;
    const double sinc = (m == 0) ? 1.0 : std::sin(x) / x;
    const double hamming = 0.54 - 0.46 * std::cos(two_pi * k / (taps - 1));
    h[k] = two_fc * sinc * hamming;
    sum += h[k];
  }
  for (double& v : h) v /= sum;  // unit DC gain
  return h;
}

/// Center-sample smoothing kernel of the least-squares polynomial fit,
/// computed through a QR factorization of the design matrix.
inline std::vector<double> savgol_kernel(int window, int order) {
  const int m = (window - 1) / 2;
  Eigen::MatrixXd v(window, order + 1);
  for (int i = 0; i < window; ++i) {
    const double x = static_cast<double>(i - m) / static_cast<double>(m);
    double pw = 1.0;
    for (int j = 0; j <= order; ++j) {
      v(i, j) = pw;
      pw *= x;
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(order + 1).triangularView<Eigen::Upper>();
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(order + 1);
  e0(0) = 1.0;
  const Eigen::VectorXd u = r.transpose().triangularView<Eigen::Lower>().solve(e0);
  const Eigen::VectorXd w = r.triangularView<Eigen::Upper>().solve(u);
  const Eigen::VectorXd hv = v * w;
  return {hv.data(), hv.data() + hv.size()};
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Frequency-domain Wiener filter. The signal PSD comes from Hann-windowed
/// half-overlapping segment averaging; the noise power is the median of the
/// top-octave PSD floor unless a fixed value is supplied.
inline std::vector<double> wiener_denoise(const std::vector<double>& x, int segment,
                                          double fixed_noise_power) {
  const std::size_t n = x.size();
  std::size_t seg = segment > 0 ? static_cast<std::size_t>(segment)
                                : std::bit_floor(std::max<std::size_t>(16, 2 * n / 9));
  seg = std::min(seg, std::bit_floor(n));
  if (seg < 8) throw input_error("wiener: series shorter than the minimum segment");

  Eigen::FFT<double> fft;
  std::vector<double> hann(seg);
  for (std::size_t k = 0; k < seg; ++k)
    hann[k] = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(k) / (seg - 1));

  const std::size_t step = seg / 2;
  const std::size_t nseg = 1 + (n - seg) / step;
  std::vector<double> psd(seg / 2 + 1, 0.0);
  std::vector<double> buf(seg);
  std::vector<std::complex<double>> spec;
  double wnorm = 0.0;
  for (double w : hann) wnorm += w * w;
  for (std::size_t s = 0; s < nseg; ++s) {
    const std::size_t off = s * step;
    for (std::size_t k = 0; k < seg; ++k) buf[k] = x[off + k] * hann[k];
    fft.fwd(spec, buf);
    for (std::size_t k = 0; k <= seg / 2; ++k) psd[k] += std::norm(spec[k]) / wnorm;
  }
  for (double& v : psd) v /= static_cast<double>(nseg);

  double noise_power = fixed_noise_power;
  if (noise_power < 0.0) {
    std::vector<double> top(psd.begin() + static_cast<long>(seg / 4), psd.end());
    noise_power = median_of(std::move(top));
  }

  // Whole-record spectrum on a reflected power-of-two extension.
  const std::size_t m = std::bit_ceil(std::max<std::size_t>(n, seg));
  const std::size_t pad_left = (m - n) / 2;
  std::vector<double> padded(m);
  for (std::size_t i = 0; i < m; ++i)
    padded[i] = x[reflect_index(static_cast<long long>(i) - static_cast<long long>(pad_left),
                                static_cast<long long>(n))];
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, padded);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t kk = std::min(k, m - k);
    // Map the dense bin onto the Welch grid.
    std::size_t kb = (m == 0) ? 0 : (kk * seg + m / 2) / m;
    kb = std::min(kb, seg / 2);
    const double p = psd[kb];
    double gain;
    if (noise_power <= 0.0)
      gain = 1.0;
    else if (p > 0.0)
      gain = std::max(0.0, (p - noise_power) / p);
    else
      gain = 0.0;
    freq[k] *= gain;
  }
  std::vector<double> out;
  fft.inv(out, freq);
  return {out.begin() + static_cast<long>(pad_left), out.begin() + static_cast<long>(pad_left + n)};
}

// Daubechies 4-tap analysis pair: {(1+v3), (3+v3), (3-v3), (1-v3)} / (4*v2).
inline constexpr double kDb4H[4] = {
    0.48296291314453414, 0.83651630373780791, 0.22414386804201338, -0.12940952255126038};
inline constexpr double kDb4G[4] = {kDb4H[3], -kDb4H[2], kDb4H[1], -kDb4H[0]};

inline void dwt_level(const std::vector<double>& x, std::vector<double>& approx,
                      std::vector<double>& det) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  approx.assign(half, 0.0);
  det.assign(half, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double v = x[(2 * i + k) % n];
      a += kDb4H[k] * v;
      d += kDb4G[k] * v;
    }
    approx[i] = a;
    det[i] = d;
  }
}

inline void idwt_level(const std::vector<double>& approx, const std::vector<double>& det,
                       std::vector<double>& x) {
  const std::size_t half = approx.size();
  const std::size_t n = 2 * half;
  x.assign(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t idx = (2 * i + k) % n;
      x[idx] += kDb4H[k] * approx[i] + kDb4G[k] * det[i];
    }
  }
}

/// Periodized db4 transform on a reflected power-of-two extension with
/// soft universal thresholding of all detail bands.
inline std::vector<double> wavelet_denoise(const std::vector<double>& x, int levels,
                                           double threshold_scale) {
  const std::size_t n = x.size();
  const std::size_t m = std::bit_ceil(n);
  if ((m >> levels) < 4) throw input_error("wavelet: series too short for the level count");
  const std::size_t pad_left = (m - n) / 2;
  std::vector<double> approx(m);
  for (std::size_t i = 0; i < m; ++i)
    approx[i] = x[reflect_index(static_cast<long long>(i) - static_cast<long long>(pad_left),
                                static_cast<long long>(n))];

  std::vector<std::vector<double>> details(levels);
  std::vector<double> next;
  for (int l = 0; l < levels; ++l) {
    dwt_level(approx, next, details[l]);
    approx.swap(next);
  }

  if (threshold_scale > 0.0) {
    std::vector<double> mad(details[0].size());
    for (std::size_t i = 0; i < mad.size(); ++i) mad[i] = std::abs(details[0][i]);
    const double sigma = median_of(std::move(mad)) / 0.6745;
    const double thr = threshold_scale * sigma * std::sqrt(2.0 * std::log(static_cast<double>(m)));
    for (auto& band : details) {
      for (double& d : band) {
        const double mag = std::abs(d) - thr;
        d = (mag > 0.0) ? (d > 0.0 ? mag : -mag) : 0.0;
      }
    }
  }

  for (int l = levels - 1; l >= 0; --l) {
    idwt_level(approx, details[l], next);
    approx.swap(next);
  }
  return {approx.begin() + static_cast<long>(pad_left),
          approx.begin() + static_cast<long>(pad_left + n)};
}

inline std::vector<double> denoise_axis(const std::vector<double>& x, const FilterConfig& cfg,
                                        double fs) {
  switch (cfg.kind) {
    case FilterKind::fir:
      if (x.size() < static_cast<std::size_t>(cfg.fir_taps))
        throw input_error("fir: series shorter than the tap count");
      return convolve_centered(x, fir_lowpass_taps(cfg.fir_taps, cfg.fir_cutoff_hz, fs));
    case FilterKind::savitzky_golay:
      if (x.size() < static_cast<std::size_t>(cfg.sg_window))
        throw input_error("sg: series shorter than the window");
      return convolve_centered(x, savgol_kernel(cfg.sg_window, cfg.sg_order));
    case FilterKind::wiener:
      return wiener_denoise(x, cfg.wiener_segment, cfg.wiener_noise_power);
    default:
      return wavelet_denoise(x, cfg.wavelet_levels, cfg.wavelet_threshold_scale);
  }
}

}  // namespace detail

/// Denoise each axis independently; length and sample rate are preserved.
inline RateSeries denoise(const RateSeries& series, const FilterConfig& cfg) {
  series.validate();
  cfg.validate(series.sample_rate);
  RateSeries out = series;
  out.p = detail::denoise_axis(series.p, cfg, series.sample_rate);
  out.q = detail::denoise_axis(series.q, cfg, series.sample_rate);
  out.r = detail::denoise_axis(series.r, cfg, series.sample_rate);
  return out;
}

/// Baseline heading estimate: denoise, average the horizontal rates over the
/// window, then apply the leveled gyrocompassing closed form.
inline double estimate_heading_filtered(const RateSeries& series, const FilterConfig& cfg) {
  const RateSeries clean = denoise(series, cfg);
  return gyrocompass_leveled(mean_rates(clean));
}

}  // namespace gclab
