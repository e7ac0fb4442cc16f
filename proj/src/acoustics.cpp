#include "phonovec/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "phonovec/error.hpp"
#include "phonovec/stats.hpp"

namespace phonovec {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd hann(Eigen::Index n) {
  Eigen::VectorXd w(n);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2 * kPi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return w;
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

struct FrameFormants {
  double f1, f2, b1;
};

}  // namespace

std::string_view to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::F1: return "F1";
    case MeasureKind::F2: return "F2";
    case MeasureKind::F1BW: return "F1BW";
    case MeasureKind::HNR: return "HNR";
    case MeasureKind::COG: return "COG";
  }
  return "F1";
}

MeasureKind parse_measure_kind(std::string_view text) {
  for (auto k : {MeasureKind::F1, MeasureKind::F2, MeasureKind::F1BW, MeasureKind::HNR,
                 MeasureKind::COG}) {
    if (to_string(k) == text) return k;
  }
  throw Error(Errc::Parse, "unknown measurement '" + std::string(text) + "'");
}

Eigen::VectorXd segment_samples(const Waveform& w, double t_start, double t_end) {
  const auto n = w.samples.size();
  const auto begin = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::llround(t_start * w.sample_rate)), 0, n);
  const auto end = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::llround(t_end * w.sample_rate)), begin, n);
  return w.samples.segment(begin, end - begin);
}

Eigen::VectorXd resample(const Eigen::VectorXd& x, double from_rate, double to_rate) {
  if (from_rate == to_rate) return x;
  const double ratio = to_rate / from_rate;
  const double scale = std::min(1.0, ratio);
  constexpr double kZeroCrossings = 16.0;
  const double half_width = kZeroCrossings / scale;
  const auto n_out = static_cast<Eigen::Index>(std::floor(static_cast<double>(x.size()) * ratio));
  Eigen::VectorXd y(n_out);
  for (Eigen::Index m = 0; m < n_out; ++m) {
    const double centre = static_cast<double>(m) / ratio;
    const auto lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(centre - half_width)));
    const auto hi = std::min<Eigen::Index>(x.size() - 1,
                                           static_cast<Eigen::Index>(std::floor(centre + half_width)));
    double acc = 0.0;
    for (Eigen::Index k = lo; k <= hi; ++k) {
      const double d = centre - static_cast<double>(k);
      const double taper = 0.5 + 0.5 * std::cos(kPi * d / half_width);
      acc += x[k] * scale * sinc(scale * d) * taper;
    }
    y[m] = acc;
  }
  return y;
}

Eigen::VectorXd lpc_coefficients(const Eigen::VectorXd& frame, int order) {
  Eigen::VectorXd r(order + 1);
  for (int lag = 0; lag <= order; ++lag) {
    const Eigen::Index n = frame.size() - lag;
    r[lag] = n > 0 ? frame.head(n).dot(frame.tail(n)) : 0.0;
  }
  if (!(r[0] > 0.0)) return {};
  Eigen::VectorXd a = Eigen::VectorXd::Zero(order + 1);
  a[0] = 1.0;
  double err = r[0];
  for (int i = 1; i <= order; ++i) {
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc += a[j] * r[i - j];
    const double k = -acc / err;
    Eigen::VectorXd prev = a;
    for (int j = 1; j < i; ++j) a[j] = prev[j] + k * prev[i - j];
    a[i] = k;
    err *= (1.0 - k * k);
    if (!(err > 0.0)) break;
  }
  return a.tail(order);
}

FormantMeasurement formants(const Waveform& w, double t_start, double t_end,
                            const FormantParams& params) {
  const double fs_eff = std::min(w.sample_rate, 2.0 * params.ceiling_hz);
  Eigen::VectorXd x = resample(segment_samples(w, t_start, t_end), w.sample_rate, fs_eff);
  const auto win = static_cast<Eigen::Index>(std::llround(params.window_seconds * fs_eff));
  const auto hop = std::max<Eigen::Index>(1, std::llround(params.hop_seconds * fs_eff));
  if (x.size() < win || win < 2) {
    throw Error(Errc::SegmentTooShort, "segment is shorter than one formant analysis window");
  }
  for (Eigen::Index i = x.size() - 1; i > 0; --i) x[i] -= params.pre_emphasis * x[i - 1];
  const int order = params.lpc_order > 0
                        ? params.lpc_order
                        : 2 + static_cast<int>(std::ceil(fs_eff / 1000.0));
  const Eigen::VectorXd taper = hann(win);

  std::vector<double> f1s, f2s, b1s;
  for (Eigen::Index start = 0; start + win <= x.size(); start += hop) {
    const Eigen::VectorXd frame = x.segment(start, win).cwiseProduct(taper);
    const Eigen::VectorXd a = lpc_coefficients(frame, order);
    if (a.size() != order || !a.allFinite()) continue;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(order, order);
    companion.row(0) = -a.transpose();
    companion.diagonal(-1).setOnes();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) continue;
    std::vector<std::pair<double, double>> candidates;
    for (Eigen::Index i = 0; i < order; ++i) {
      const std::complex<double> z = solver.eigenvalues()[i];
      if (z.imag() <= 0.0) continue;
      const double f = fs_eff * std::arg(z) / (2 * kPi);
      const double bw = -(fs_eff / kPi) * std::log(std::abs(z));
      if (f > params.min_frequency_hz && f < params.ceiling_hz && bw < params.max_bandwidth_hz) {
        candidates.emplace_back(f, bw);
      }
    }
    if (candidates.size() < 2) continue;
    std::sort(candidates.begin(), candidates.end());
    f1s.push_back(candidates[0].first);
    f2s.push_back(candidates[1].first);
    b1s.push_back(candidates[0].second);
  }
  FormantMeasurement out;
  const int used = static_cast<int>(f1s.size());
  if (used > 0) {
    out.f1 = {MeasureKind::F1, median(f1s), used};
    out.f2 = {MeasureKind::F2, median(f2s), used};
    out.b1 = {MeasureKind::F1BW, median(b1s), used};
  }
  return out;
}

Measurement cog(const Waveform& w, double t_start, double t_end, const CogParams& params) {
  const Eigen::VectorXd x = segment_samples(w, t_start, t_end);
  Measurement m{MeasureKind::COG, std::nullopt, 0};
  if (x.size() < 2) throw Error(Errc::SegmentTooShort, "COG needs at least two samples");
  const double rms = std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
  if (!(rms > params.rms_floor)) return m;
  std::size_t nfft = 1;
  while (nfft < static_cast<std::size_t>(x.size())) nfft <<= 1;
  std::vector<double> buf(nfft, 0.0);
  const Eigen::VectorXd taper = hann(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) buf[static_cast<std::size_t>(i)] = x[i] * taper[i];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, buf);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    const double f = static_cast<double>(k) * w.sample_rate / static_cast<double>(nfft);
    const double weight = std::pow(std::abs(spec[k]), params.exponent);
    num += f * weight;
    den += weight;
  }
  if (!(den > 0.0)) return m;
  m.value = num / den;
  m.n_frames_used = 1;
  return m;
}

Measurement hnr(const Waveform& w, double t_start, double t_end, const HnrParams& params) {
  const Eigen::VectorXd x = segment_samples(w, t_start, t_end);
  const double fs = w.sample_rate;
  const auto min_lag = static_cast<Eigen::Index>(std::ceil(fs / params.pitch_ceiling_hz));
  const auto max_lag = static_cast<Eigen::Index>(std::floor(fs / params.pitch_floor_hz));
  const Eigen::Index window = max_lag;
  const auto hop = std::max<Eigen::Index>(1, std::llround(params.hop_seconds * fs));
  if (x.size() < window + max_lag) {
    throw Error(Errc::SegmentTooShort, "HNR needs two periods at the pitch floor");
  }
  constexpr double kMaxCorrelation = 1.0 - 1e-10;
  std::vector<double> voiced;
  for (Eigen::Index start = 0; start + window + max_lag <= x.size(); start += hop) {
    const auto head = x.segment(start, window);
    const double e0 = head.squaredNorm();
    if (!(e0 > 0.0)) continue;
    double best = -1.0;
    for (Eigen::Index lag = min_lag; lag <= max_lag; ++lag) {
      const auto shifted = x.segment(start + lag, window);
      const double el = shifted.squaredNorm();
      if (!(el > 0.0)) continue;
      best = std::max(best, head.dot(shifted) / std::sqrt(e0 * el));
    }
    if (best > params.voicing_threshold) {
      const double r = std::min(best, kMaxCorrelation);
      voiced.push_back(10.0 * std::log10(r / (1.0 - r)));
    }
  }
  Measurement m{MeasureKind::HNR, std::nullopt, static_cast<int>(voiced.size())};
  if (!voiced.empty()) m.value = median(voiced);
  return m;
}

Measurement measure(MeasureKind kind, const Waveform& w, double t_start, double t_end,
                    const MeasureParams& params) {
  switch (kind) {
    case MeasureKind::F1: return formants(w, t_start, t_end, params.formant).f1;
    case MeasureKind::F2: return formants(w, t_start, t_end, params.formant).f2;
    case MeasureKind::F1BW: return formants(w, t_start, t_end, params.formant).b1;
    case MeasureKind::HNR: return hnr(w, t_start, t_end, params.hnr);
    case MeasureKind::COG: return cog(w, t_start, t_end, params.cog);
  }
  return {};
}

}  // namespace phonovec
