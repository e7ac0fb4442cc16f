#include "phonovec/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include <Eigen/QR>

#include "phonovec/correlate.hpp"
#include "phonovec/error.hpp"
#include "phonovec/io_util.hpp"
#include "phonovec/rep_dump.hpp"
#include "phonovec/vector_lab.hpp"

namespace phonovec::synth {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kRate = 16000.0;

Waveform normalized(Eigen::VectorXd x, double fs) {
  const double peak = x.cwiseAbs().maxCoeff();
  if (peak > 0) x /= peak;
  return {0.9 * x, fs};
}

std::string layer_dir(int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "layer_%02d", k);
  return buf;
}

std::string numbered(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%06d", prefix, i);
  return buf;
}

Eigen::MatrixXd random_rotation(Eigen::Index d, Rng& rng) {
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = draw_normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

// Per-kind scale of one rig step and the phone label written to the log.
struct RigFeature {
  double unit;
  const char* phone;
};

RigFeature rig_feature(const SignRow& row) {
  const std::string& f = row.feature;
  const char* phone = f == "hi"      ? "i"
                      : f == "lo"    ? "a"
                      : f == "back"  ? "u"
                      : f == "round" ? "o"
                      : f == "nas"   ? "n"
                      : f == "son"   ? "l"
                      : f == "strid" ? "s"
                                     : "z";
  switch (row.kind) {
    case MeasureKind::F1: return {20.0, phone};
    case MeasureKind::F2: return {40.0, phone};
    case MeasureKind::F1BW: return {8.0, phone};
    case MeasureKind::HNR: return {1.0, phone};
    case MeasureKind::COG: return {60.0, phone};
  }
  return {1.0, phone};
}

// A 0.2 s file whose measured `kind` is controlled by `value`.
Waveform rig_signal(MeasureKind kind, double value, std::uint64_t seed) {
  const double seconds = 0.2;
  const auto n = static_cast<Eigen::Index>(seconds * kRate);
  switch (kind) {
    case MeasureKind::F1: return vowel({120, value, 80, 1500, 100}, seconds);
    case MeasureKind::F2: return vowel({120, 550, 80, value, 100}, seconds);
    case MeasureKind::F1BW: return vowel({120, 550, value, 1500, 100}, seconds);
    case MeasureKind::HNR: return harmonic_noise_mix(std::pow(10.0, value / 10.0), seconds, seed);
    case MeasureKind::COG: {
      const double w = (value - 1000.0) / 2000.0;
      Eigen::VectorXd x = sine(1000, n, kRate, std::sqrt(1 - w)) + sine(3000, n, kRate, std::sqrt(w));
      Rng rng(seed);
      x += white_noise(n, rng) * std::sqrt(power(x) * 1e-4);
      return {0.5 * x, kRate};
    }
  }
  return {};
}

}  // namespace

Eigen::VectorXd pulse_train(double f0, Eigen::Index n, double fs) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double period = fs / f0;
  for (double t = 0; t < static_cast<double>(n); t += period) x[static_cast<Eigen::Index>(t)] = 1.0;
  return x;
}

Eigen::VectorXd glottal_rolloff(const Eigen::VectorXd& x) {
  Eigen::VectorXd y = x;
  for (Eigen::Index i = 1; i < y.size(); ++i) y[i] += 0.95 * y[i - 1];
  return y;
}

Eigen::VectorXd resonate(const Eigen::VectorXd& x, double freq, double bw, double fs) {
  const double r = std::exp(-kPi * bw / fs);
  const double a1 = -2 * r * std::cos(2 * kPi * freq / fs);
  const double a2 = r * r;
  Eigen::VectorXd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y[i] = x[i] - (i > 0 ? a1 * y[i - 1] : 0.0) - (i > 1 ? a2 * y[i - 2] : 0.0);
  }
  return y;
}

Eigen::VectorXd sine(double freq, Eigen::Index n, double fs, double amplitude) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = amplitude * std::sin(2 * kPi * freq * i / fs);
  return x;
}

Eigen::VectorXd white_noise(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = draw_normal(rng);
  return x;
}

double power(const Eigen::VectorXd& x) {
  return x.size() == 0 ? 0.0 : x.squaredNorm() / static_cast<double>(x.size());
}

Waveform vowel(const VowelSpec& spec, double seconds, double fs) {
  const auto n = static_cast<Eigen::Index>(seconds * fs);
  Eigen::VectorXd x = glottal_rolloff(pulse_train(spec.f0, n, fs));
  x = resonate(x, spec.f1, spec.b1, fs);
  x = resonate(x, spec.f2, spec.b2, fs);
  if (spec.upper_formants) {
    x = resonate(x, 2500, 150, fs);
    x = resonate(x, 3500, 200, fs);
    x = resonate(x, 4500, 250, fs);
  }
  return normalized(std::move(x), fs);
}

Waveform harmonic_noise_mix(double ratio, double seconds, std::uint64_t seed, double fs) {
  Eigen::VectorXd h = vowel({}, seconds, fs).samples;
  Rng rng(seed);
  Eigen::VectorXd noise = white_noise(h.size(), rng);
  noise *= std::sqrt(power(h) / (ratio * power(noise)));
  return normalized(h + noise, fs);
}

std::vector<std::string> exact_phones() { return {"b", "p", "d", "t", "ɡ", "k", "m", "n"}; }

std::vector<std::string> noisy_phones() {
  return {"b", "p", "d", "t", "ɡ", "k", "m", "n", "s", "z", "f", "v",
          "l", "i", "u", "a", "e", "o"};
}

std::vector<std::string> null_phones() {
  return {"p", "b", "t", "d", "k", "ɡ", "q", "ɢ", "c", "ɟ", "ʈ", "ɖ", "f", "v", "s", "z",
          "ʃ", "ʒ", "θ", "ð", "x", "ɣ", "χ", "ʁ", "ç", "ʝ", "ɸ", "β", "ʂ", "ʐ", "ɕ", "ʑ",
          "m", "n", "ŋ", "ɲ", "ɳ", "ɴ", "l", "ɭ", "ʎ", "r", "ɹ", "j", "w", "h", "ɦ", "i",
          "y", "u", "ɯ", "e", "ø", "o", "ɤ", "ɛ", "œ", "ɔ", "ʌ", "a", "ɑ", "æ", "ɒ", "ɪ",
          "ʊ", "ə"};
}

void write_bank_corpus(const fs::path& root, const BankSpec& spec, const FeatureTable& table) {
  if (spec.phones.empty() || spec.instances < 1) {
    throw Error(Errc::InvalidConfig, "synthetic bank needs phones and instances");
  }
  for (const auto& p : spec.phones) {
    if (!table.contains(p)) throw Error(Errc::UnknownPhone, "unknown phone: " + p);
  }
  const Eigen::Index dims = spec.null_vectors ? spec.null_dims : 2 * table.num_features();
  Rng rng(derive_seed(spec.seed, fnv1a64("bank")));

  // One instance of every phone per utterance, in a per-utterance order.
  struct Seg {
    std::size_t phone;
    Eigen::VectorXd vec;
  };
  std::vector<std::vector<Seg>> utts(static_cast<std::size_t>(spec.instances));
  for (auto& utt : utts) {
    std::vector<std::size_t> order(spec.phones.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[draw_index(rng, i)]);
    for (std::size_t p : order) {
      Eigen::VectorXd v(dims);
      if (spec.null_vectors) {
        for (Eigen::Index d = 0; d < dims; ++d) v[d] = draw_normal(rng);
      } else {
        v = table.binary(spec.phones[p]).cast<double>();
        for (Eigen::Index d = 0; d < dims; ++d) v[d] += spec.sigma * draw_normal(rng);
      }
      utt.push_back({p, std::move(v)});
    }
  }

  constexpr std::uint32_t stride = 320;
  const double frame_seconds = stride / kRate;
  std::vector<SegmentRecord> manifest;
  for (std::size_t u = 0; u < utts.size(); ++u) {
    const std::string id = numbered("u", static_cast<int>(u));
    for (std::size_t s = 0; s < utts[u].size(); ++s) {
      const double t0 = static_cast<double>(2 * s) * frame_seconds;
      manifest.push_back({id, spec.phones[utts[u][s].phone], t0, t0 + 2 * frame_seconds, "synth",
                          "synthetic"});
    }
  }

  Rng rot_rng(derive_seed(spec.seed, fnv1a64("rotation")));
  for (int k = 0; k < spec.n_layers; ++k) {
    const Eigen::MatrixXd q = k == 0 ? Eigen::MatrixXd::Identity(dims, dims).eval()
                                     : random_rotation(dims, rot_rng);
    std::vector<std::pair<std::string, RepresentationMatrix>> reps;
    for (std::size_t u = 0; u < utts.size(); ++u) {
      RepresentationMatrix rep;
      rep.stride_samples = stride;
      rep.sample_rate = static_cast<std::uint32_t>(kRate);
      rep.layer_index = k;
      rep.model_id = "synthetic";
      rep.data.resize(static_cast<Eigen::Index>(2 * utts[u].size()), dims);
      for (std::size_t s = 0; s < utts[u].size(); ++s) {
        const Eigen::RowVectorXf row = (q * utts[u][s].vec).transpose().cast<float>();
        rep.data.row(static_cast<Eigen::Index>(2 * s)) = row;
        rep.data.row(static_cast<Eigen::Index>(2 * s + 1)) = row;
      }
      reps.emplace_back(numbered("u", static_cast<int>(u)), std::move(rep));
    }
    write_rep_dump(root / layer_dir(k), manifest, reps);
  }
}

void write_dsp_signals(const fs::path& dir, std::uint64_t seed) {
  fs::create_directories(dir);
  const double seconds = 0.5;
  const auto n = static_cast<Eigen::Index>(seconds * kRate);
  const auto put = [&](const char* name, const Waveform& w) {
    write_wav(dir / name, w, WavEncoding::Float32);
  };
  put("sine_1000.wav", {sine(1000, n, kRate, 0.5), kRate});
  put("sines_500_1500.wav", {sine(500, n, kRate, 0.4) + sine(1500, n, kRate, 0.4), kRate});
  put("vowel_500_1500.wav", vowel({120, 500, 80, 1500, 80}, seconds));
  put("pulse_125.wav", normalized(pulse_train(125, n, kRate), kRate));
  Rng rng(derive_seed(seed, fnv1a64("noise")));
  put("noise.wav", normalized(white_noise(n, rng), kRate));
  put("mix_10_1.wav", harmonic_noise_mix(10.0, seconds, derive_seed(seed, 1)));
  put("mix_1_1.wav", harmonic_noise_mix(1.0, seconds, derive_seed(seed, 2)));
  put("mix_1_10.wav", harmonic_noise_mix(0.1, seconds, derive_seed(seed, 3)));
  put("silence.wav", {Eigen::VectorXd::Zero(n), kRate});
}

void write_correlation_rig(const fs::path& dir, int per_feature, std::uint64_t seed) {
  fs::create_directories(dir / "orig");
  fs::create_directories(dir / "edited");
  std::string log;
  int next = 0;
  for (const SignRow& row : default_sign_table()) {
    const RigFeature rf = rig_feature(row);
    Rng rng(derive_seed(seed, fnv1a64("rig"), fnv1a64(row.feature)));
    for (int i = 0; i < per_feature; ++i) {
      double base = 0.0;
      switch (row.kind) {
        case MeasureKind::F1: base = 450 + 200 * draw_unit(rng); break;
        case MeasureKind::F2: base = 1300 + 400 * draw_unit(rng); break;
        case MeasureKind::F1BW: base = 70 + 20 * draw_unit(rng); break;
        case MeasureKind::HNR: base = 8 + 4 * draw_unit(rng); break;
        case MeasureKind::COG: base = 1800 + 400 * draw_unit(rng); break;
      }
      const double lambda = -5.0 + 10.0 * draw_unit(rng);
      const double jitter = 0.1 * draw_normal(rng);
      const double edited = base + (row.expected_sign * 0.5 * lambda + jitter) * rf.unit;

      EditSpec e;
      e.edit_id = numbered("e", next++);
      e.utterance_id = "rig_" + row.feature + "_" + numbered("", i);
      e.phone = rf.phone;
      e.t_start = 0.05;
      e.t_end = 0.15;
      e.frames = {2, 8};
      e.feature = row.feature;
      e.phone_class = row.phone_class;
      e.lambda = lambda;
      const std::uint64_t s0 = rng(), s1 = rng();
      write_wav(dir / "orig" / (e.utterance_id + ".wav"), rig_signal(row.kind, base, s0),
                WavEncoding::Float32);
      write_wav(dir / "edited" / (e.edit_id + ".wav"), rig_signal(row.kind, edited, s1),
                WavEncoding::Float32);
      log += to_json(e).dump() + "\n";
    }
  }
  write_file_atomic(dir / "edits.jsonl", log);
}

void write_stability_batch(const fs::path& dir, int n, std::uint64_t seed) {
  fs::create_directories(dir / "orig");
  fs::create_directories(dir / "resynth");
  Rng rng(derive_seed(seed, fnv1a64("stability")));
  std::string log;
  for (int i = 0; i < n; ++i) {
    VowelSpec v{100 + 40 * draw_unit(rng), 400 + 300 * draw_unit(rng), 60 + 40 * draw_unit(rng),
                1200 + 600 * draw_unit(rng), 100};
    Waveform orig = vowel(v, 0.2);
    Rng noise_rng(rng());
    // Aspiration 20 dB down, so the originals are not perfectly periodic.
    orig.samples += white_noise(orig.samples.size(), noise_rng) * std::sqrt(power(orig.samples) * 1e-2);
    Waveform resynth = orig;
    resynth.samples += white_noise(orig.samples.size(), noise_rng) * std::sqrt(power(orig.samples) * 1e-4);

    EditSpec e;
    e.edit_id = numbered("s", i);
    e.utterance_id = numbered("stab_", i);
    e.phone = "a";
    e.t_start = 0.05;
    e.t_end = 0.15;
    e.frames = {2, 8};
    e.feature = "lo";
    e.phone_class = PhoneClass::Vowel;
    e.lambda = 0.0;
    write_wav(dir / "orig" / (e.utterance_id + ".wav"), orig, WavEncoding::Float32);
    write_wav(dir / "resynth" / (e.edit_id + ".wav"), resynth, WavEncoding::Float32);
    log += to_json(e).dump() + "\n";
  }
  write_file_atomic(dir / "edits.jsonl", log);
}

}  // namespace phonovec::synth
