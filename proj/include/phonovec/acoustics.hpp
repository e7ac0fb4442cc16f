#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "phonovec/wav.hpp"

namespace phonovec {

enum class MeasureKind { F1, F2, F1BW, HNR, COG };
std::string_view to_string(MeasureKind kind);
MeasureKind parse_measure_kind(std::string_view text);

struct Measurement {
  MeasureKind kind = MeasureKind::F1;
  std::optional<double> value;  // Hz for F1/F2/F1BW/COG, dB for HNR
  int n_frames_used = 0;

  bool defined() const { return value.has_value(); }
};

struct FormantParams {
  double pre_emphasis = 0.97;
  double window_seconds = 0.025;
  double hop_seconds = 0.010;
  double ceiling_hz = 5500.0;
  double min_frequency_hz = 90.0;
  double max_bandwidth_hz = 700.0;
  /// 0 selects 2 + ceil(fs_eff / 1000).
  int lpc_order = 0;
};

struct CogParams {
  /// Spectral weights are |X(f)|^exponent; 2 weights by power.
  double exponent = 2.0;
  double rms_floor = 1e-9;
};

struct HnrParams {
  double pitch_floor_hz = 75.0;
  double pitch_ceiling_hz = 500.0;
  double hop_seconds = 0.010;
  double voicing_threshold = 0.3;
};

struct MeasureParams {
  FormantParams formant;
  CogParams cog;
  HnrParams hnr;
};

struct FormantMeasurement {
  Measurement f1{MeasureKind::F1, std::nullopt, 0};
  Measurement f2{MeasureKind::F2, std::nullopt, 0};
  Measurement b1{MeasureKind::F1BW, std::nullopt, 0};
};

/// Samples of [t_start, t_end) (clamped to the waveform).
Eigen::VectorXd segment_samples(const Waveform& w, double t_start, double t_end);

/// Band-limited (windowed-sinc) sample-rate conversion.
Eigen::VectorXd resample(const Eigen::VectorXd& x, double from_rate, double to_rate);

/// Autocorrelation-method LPC by Levinson-Durbin: returns a_1..a_p of
/// A(z) = 1 + sum a_k z^-k. Empty when the frame has no energy.
Eigen::VectorXd lpc_coefficients(const Eigen::VectorXd& frame, int order);

/// Frame-wise LPC formant tracking reduced to medians over frames with at
/// least two candidates in (min_frequency, ceiling) with bandwidth below
/// the gate. Throws SegmentTooShort below one analysis window.
FormantMeasurement formants(const Waveform& w, double t_start, double t_end,
                            const FormantParams& params = {});

/// Spectral centre of gravity of the Hann-windowed segment.
Measurement cog(const Waveform& w, double t_start, double t_end, const CogParams& params = {});

/// Median over voiced frames of 10 log10(r / (1 - r)), r the peak
/// normalized cross-correlation at pitch lags.
Measurement hnr(const Waveform& w, double t_start, double t_end, const HnrParams& params = {});

Measurement measure(MeasureKind kind, const Waveform& w, double t_start, double t_end,
                    const MeasureParams& params = {});

}  // namespace phonovec
