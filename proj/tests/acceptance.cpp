// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: phonovec_acceptance <work-dir>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "csv.hpp"
#include "oracles.hpp"
#include "phonovec/acoustics.hpp"
#include "phonovec/analogy.hpp"
#include "phonovec/io_util.hpp"
#include "phonovec/stats.hpp"
#include "phonovec/vector_lab.hpp"

using namespace phonovec;
namespace fs = std::filesystem;

namespace {

fs::path g_work;
int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!pass) ++g_failures;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// Runs the CLI; stdout and stderr go to <work>/logs/<tag>.log.
int run(const std::string& tag, const std::string& args) {
  fs::create_directories(g_work / "logs");
  const auto log = g_work / "logs" / (tag + ".log");
  const std::string cmd = std::string(PHONOVEC_CLI) + " " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (code != 0) std::cerr << "command failed (" << code << "): " << cmd << "\n" << read_file(log);
  return code;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::vector<std::map<std::string, std::string>> csv_records(const fs::path& path) {
  const auto rows = read_csv(path);
  std::vector<std::map<std::string, std::string>> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::map<std::string, std::string> rec;
    for (std::size_t j = 0; j < rows[0].size() && j < rows[i].size(); ++j) rec[rows[0][j]] = rows[i][j];
    out.push_back(std::move(rec));
  }
  return out;
}

double to_d(const std::string& s) { return s.empty() ? std::nan("") : std::stod(s); }

const fs::path& data() {
  static const fs::path d = g_work / "synthetic";
  return d;
}

void exact_analogy() {
  const auto out = g_work / "exact_eval";
  const auto t0 = std::chrono::steady_clock::now();
  const int code = run("exact_eval", "eval --dump " + q(data() / "exact") + " --jobs 1 --seed 1 --out " + q(out));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (code != 0) return report("exact-analogy", false, "eval exited with " + std::to_string(code));
  bool ok = secs < 60;
  int layers = 0;
  double min_rate = 1, min_pcs = 1;
  std::size_t quads = 0;
  for (const auto& r : csv_records(out / "summary.csv")) {
    if (r.at("stratum") != "all") continue;
    ++layers;
    quads = std::stoul(r.at("n_quads"));
    min_rate = std::min(min_rate, to_d(r.at("success_rate")));
    min_pcs = std::min(min_pcs, to_d(r.at("pcs")));
    ok = ok && quads >= 2 && to_d(r.at("success_rate")) == 1.0 && to_d(r.at("pcs")) >= 0.99;
  }
  ok = ok && layers > 0;
  report("exact-analogy", ok,
         std::to_string(layers) + " layers, " + std::to_string(quads) + " quadruplets/layer, success " +
             num(min_rate) + ", PCS >= " + num(min_pcs) + ", " + num(secs) + " s at --jobs 1");
}

void null_corpus() {
  const auto out = g_work / "null_eval";
  if (run("null_eval", "eval --dump " + q(data() / "null") + " --seed 1 --out " + q(out)) != 0) {
    return report("null-corpus", false, "eval failed");
  }
  for (const auto& r : csv_records(out / "summary.csv")) {
    if (r.at("stratum") != "all") continue;
    const double rate = to_d(r.at("success_rate")), pcs = to_d(r.at("pcs"));
    return report("null-corpus", rate <= 0.05 && pcs >= 0.4 && pcs <= 0.6,
                  r.at("n_quads") + " quadruplets, success " + num(rate) + ", PCS " + num(pcs));
  }
  report("null-corpus", false, "no summary row");
}

void mining_equivalence() {
  Rng rng(20240611);
  int tables = 0, vocabularies = 0, mismatches = 0;
  std::size_t total = 0;
  for (; tables < 50; ++tables) {
    const int n_features = 2 + static_cast<int>(draw_index(rng, 5));
    const auto table = oracle::random_table(rng, 16, n_features);
    for (int v = 0; v < 4; ++v, ++vocabularies) {
      auto phones = table.phones();
      for (std::size_t i = phones.size(); i > 1; --i) std::swap(phones[i - 1], phones[draw_index(rng, i)]);
      phones.resize(1 + draw_index(rng, 12));
      const auto mined = mine_quadruplets(table, phones);
      const auto expect = oracle::brute_force_mine(table, phones);
      std::set<oracle::Tuple> got;
      for (const auto& qd : mined.quadruplets) got.insert(qd.phones);
      if (got != expect.canonical || mined.raw_count != expect.ordered ||
          got.size() != mined.quadruplets.size()) {
        ++mismatches;
      }
      total += got.size();
    }
  }
  report("mining-equivalence", mismatches == 0,
         std::to_string(vocabularies) + " vocabularies over " + std::to_string(tables) + " tables, " +
             std::to_string(total) + " canonical quadruplets, " + std::to_string(mismatches) + " mismatches");
}

void pooling() {
  Rng rng(7);
  double worst = 0;
  for (int c = 0; c < 1000; ++c) {
    RepresentationMatrix rep;
    const auto T = static_cast<Eigen::Index>(1 + draw_index(rng, 80));
    const auto F = static_cast<Eigen::Index>(1 + draw_index(rng, 32));
    rep.data.resize(T, F);
    for (Eigen::Index i = 0; i < rep.data.size(); ++i) rep.data.data()[i] = static_cast<float>(draw_normal(rng) * 10);
    const double secs = T * 0.02;
    SegmentRecord seg;
    if (c % 10 == 0) {
      seg.t_start = 0, seg.t_end = secs;
    } else if (c % 10 == 1) {
      const auto t = static_cast<double>(draw_index(rng, static_cast<std::size_t>(T)));
      seg.t_start = t * 0.02, seg.t_end = t * 0.02 + 0.01;
    } else {
      seg.t_start = draw_unit(rng) * secs * 0.99;
      seg.t_end = seg.t_start + draw_unit(rng) * (secs - seg.t_start);
    }
    // Frame index of a time is floor(t * rate / stride) at 20 ms frames.
    auto begin = static_cast<Eigen::Index>(std::floor(seg.t_start * 50 + 1e-9));
    auto end = std::min(T, static_cast<Eigen::Index>(std::ceil(seg.t_end * 50 - 1e-9)));
    if (end <= begin) end = begin + 1;
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(F);
    for (Eigen::Index t = begin; t < end; ++t)
      for (Eigen::Index f = 0; f < F; ++f) expect[f] += rep.data(t, f);
    expect /= static_cast<double>(end - begin);
    const auto got = slice_and_pool(rep, seg);
    for (Eigen::Index f = 0; f < F; ++f) {
      worst = std::max(worst, std::abs(got[f] - expect[f]) / std::max(1.0, std::abs(expect[f])));
    }
  }
  report("pooling", worst <= 1e-6, "1000 cases, worst relative error " + num(worst));
}

void edit_contract() {
  Rng rng(11);
  std::size_t outside_changed = 0, identity_broken = 0;
  double worst = 0;
  for (int c = 0; c < 1000; ++c) {
    RepresentationMatrix rep;
    const auto T = static_cast<Eigen::Index>(1 + draw_index(rng, 50));
    const auto F = static_cast<Eigen::Index>(1 + draw_index(rng, 32));
    rep.data.resize(T, F);
    for (Eigen::Index i = 0; i < rep.data.size(); ++i) rep.data.data()[i] = static_cast<float>(draw_normal(rng));
    PhonologicalVector v;
    v.direction.resize(F);
    for (Eigen::Index i = 0; i < F; ++i) v.direction[i] = draw_normal(rng);
    EditSpec spec;
    spec.frames.begin = static_cast<Eigen::Index>(draw_index(rng, static_cast<std::size_t>(T)));
    spec.frames.end = spec.frames.begin + 1 + static_cast<Eigen::Index>(draw_index(rng, static_cast<std::size_t>(T - spec.frames.begin)));
    spec.lambda = c % 20 == 0 ? 0.0 : -5 + 10 * draw_unit(rng);
    const auto out = apply_edit(rep, spec, v);
    if (spec.lambda == 0.0) {
      identity_broken += std::memcmp(out.data.data(), rep.data.data(), sizeof(float) * rep.data.size()) != 0;
      continue;
    }
    for (Eigen::Index t = 0; t < T; ++t) {
      const bool inside = t >= spec.frames.begin && t < spec.frames.end;
      for (Eigen::Index f = 0; f < F; ++f) {
        if (!inside) {
          outside_changed += std::memcmp(&out.data(t, f), &rep.data(t, f), sizeof(float)) != 0;
        } else {
          const double diff = static_cast<double>(out.data(t, f)) - rep.data(t, f);
          const double want = spec.lambda * v.direction[f];
          worst = std::max(worst, std::abs(diff - want) / std::max(1.0, std::abs(want)));
        }
      }
    }
  }
  report("edit-contract", outside_changed == 0 && identity_broken == 0 && worst <= 1e-6,
         "1000 cases, " + std::to_string(outside_changed) + " outside cells changed, " +
             std::to_string(identity_broken) + " identity failures, worst in-span error " + num(worst));
}

void dsp() {
  const auto dir = data() / "dsp";
  std::ostringstream d;
  bool ok = true;
  const auto sine = cog(read_wav(dir / "sine_1000.wav"), 0, 0.5);
  ok = ok && sine.defined() && std::abs(*sine.value - 1000) <= 10;
  const auto two = cog(read_wav(dir / "sines_500_1500.wav"), 0, 0.5);
  ok = ok && two.defined() && std::abs(*two.value - 1000) <= 20;
  d << "COG " << num(sine.value.value_or(NAN)) << " / " << num(two.value.value_or(NAN)) << " Hz";

  const auto fm = formants(read_wav(dir / "vowel_500_1500.wav"), 0, 0.5);
  const bool fok = fm.f1.defined() && fm.f2.defined() && std::abs(*fm.f1.value - 500) <= 50 &&
                   std::abs(*fm.f2.value - 1500) <= 150;
  ok = ok && fok;
  d << "; F1/F2 " << num(fm.f1.value.value_or(NAN)) << "/" << num(fm.f2.value.value_or(NAN)) << " Hz";

  // Undefined HNR ranks below every defined value.
  std::vector<double> h;
  for (const char* f : {"mix_10_1.wav", "mix_1_1.wav", "mix_1_10.wav"}) {
    const auto m = hnr(read_wav(dir / f), 0, 0.5);
    h.push_back(m.value.value_or(-std::numeric_limits<double>::infinity()));
  }
  const bool hok = h[0] > h[1] && h[1] > h[2];
  ok = ok && hok;
  d << "; HNR " << num(h[0]) << " > " << num(h[1]) << " > " << num(h[2]) << " dB";

  Rng rng(5);
  double worst = 0;
  bool monotone = true;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 3 + draw_index(rng, 60);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(draw_index(rng, 10));
      y[i] = c % 2 ? draw_normal(rng) : static_cast<double>(draw_index(rng, 5));
    }
    try {
      worst = std::max(worst, std::abs(spearman(x, y) - oracle::spearman(x, y)));
    } catch (const Error&) {
    }
    std::vector<double> up(n), down(n);
    for (std::size_t i = 0; i < n; ++i) up[i] = std::exp(0.1 * i), down[i] = -std::pow(i, 3.0);
    std::vector<double> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<double>(i);
    monotone = monotone && spearman(idx, up) == 1.0 && spearman(idx, down) == -1.0;
  }
  ok = ok && worst <= 1e-12 && monotone;
  d << "; Spearman oracle error " << num(worst) << (monotone ? ", +/-1 on monotone data" : ", monotone check failed");
  report("dsp-oracles", ok, d.str());
}

void correlation_rig() {
  const auto rig = data() / "rig";
  const auto out = g_work / "rig_correlate";
  if (run("rig_correlate", "correlate --edits " + q(rig / "edits.jsonl") + " --orig-audio " + q(rig / "orig") +
                               " --edited-audio " + q(rig / "edited") + " --jobs 4 --out " + q(out)) != 0) {
    return report("correlation-rig", false, "correlate failed");
  }
  bool ok = true;
  std::ostringstream d;
  double min_abs = 1;
  int rows = 0;
  for (const auto& r : csv_records(out / "correlation.csv")) {
    ++rows;
    const double rho = to_d(r.at("rho"));
    min_abs = std::min(min_abs, std::abs(rho));
    ok = ok && std::abs(rho) >= 0.9 && r.at("sign_match") == "true";
  }
  ok = ok && rows == 8;
  d << rows << " features, min |rho| " << num(min_abs);

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> scatter;
  for (const auto& r : csv_records(out / "scatter.csv")) {
    auto& [l, dl] = scatter[r.at("feature")];
    l.push_back(to_d(r.at("lambda")));
    dl.push_back(to_d(r.at("delta")));
  }
  Rng rng(99);
  int worst_pass = 100;
  for (auto& [feature, xy] : scatter) {
    auto lambdas = xy.first;
    int pass = 0;
    for (int t = 0; t < 100; ++t) {
      for (std::size_t i = lambdas.size(); i > 1; --i) std::swap(lambdas[i - 1], lambdas[draw_index(rng, i)]);
      pass += std::abs(spearman(lambdas, xy.second)) <= 0.2;
    }
    worst_pass = std::min(worst_pass, pass);
  }
  ok = ok && scatter.size() == 8 && worst_pass >= 95;
  d << "; permuted lambda |rho| <= 0.2 in >= " << worst_pass << "/100 trials per feature";
  report("correlation-rig", ok, d.str());
}

void sample_efficiency_check() {
  const auto out = g_work / "noisy_vectors";
  if (run("noisy_vectors", "vectors --dump " + q(data() / "noisy") + " --repeats 1000 --seed 1 --out " + q(out)) != 0) {
    return report("sample-efficiency", false, "vectors failed");
  }
  std::map<std::string, std::vector<std::pair<int, double>>> curves;
  for (const auto& r : csv_records(out / "sample_efficiency_summary.csv")) {
    curves[r.at("vector")].emplace_back(std::stoi(r.at("N")), to_d(r.at("mean_cosine")));
  }
  bool ok = curves.size() == 8;
  double lowest_final = 1;
  for (auto& [name, c] : curves) {
    std::sort(c.begin(), c.end());
    for (std::size_t i = 1; i < c.size(); ++i) ok = ok && c[i].second >= c[i - 1].second;
    ok = ok && c.back().first == 256 && c.back().second >= 0.99;
    lowest_final = std::min(lowest_final, c.back().second);
  }
  report("sample-efficiency", ok,
         std::to_string(curves.size()) + " vectors non-decreasing over N, lowest mean cosine at N=256 " +
             num(lowest_final));
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return files;
}

void determinism() {
  const auto base = g_work / "determinism";
  fs::remove_all(base);
  std::vector<std::string> failed;
  std::size_t compared = 0;
  // Inputs are shared so both runs see the same config; generated corpora
  // are compared separately.
  const auto syn = base / "jobs1" / "gen";
  for (int jobs : {1, 8}) {
    const auto o = base / ("jobs" + std::to_string(jobs));
    const std::string j = " --seed 5 --jobs " + std::to_string(jobs);
    const auto check = [&](const std::string& tag, const std::string& args) {
      if (run("det_" + tag + std::to_string(jobs), args + j) != 0) failed.push_back(tag);
    };
    check("gen-synthetic", "gen-synthetic --instances 40 --n-layers 2 --rig-edits 12 --out " + q(o / "gen"));
    check("mine", "mine --dump " + q(syn / "noisy") + " --min-occurrences 1 --out " + q(o / "mine"));
    check("eval", "eval --dump " + q(syn / "exact") + " --min-occurrences 1 --n-samples 200 --out " + q(o / "eval"));
    check("pcs", "pcs --dump " + q(syn / "null") + " --min-occurrences 1 --out " + q(o / "pcs"));
    check("vectors", "vectors --dump " + q(syn / "noisy") + " --min-occurrences 1 --repeats 100 --out " + q(o / "vectors"));
    check("edit", "edit --dump " + q(syn / "noisy") + " --min-occurrences 1 --vectors " +
                      q(base / "jobs1" / "vectors" / "vectors.jsonl") + " --feature voi --n-utts 50 --out " + q(o / "edit"));
    check("correlate", "correlate --edits " + q(syn / "rig" / "edits.jsonl") + " --orig-audio " + q(syn / "rig" / "orig") +
                           " --edited-audio " + q(syn / "rig" / "edited") + " --min-pairs 5 --out " + q(o / "correlate"));
    check("stability", "stability --edits " + q(syn / "stability" / "edits.jsonl") + " --orig-audio " +
                           q(syn / "stability" / "orig") + " --edited-audio " + q(syn / "stability" / "resynth") +
                           " --out " + q(o / "stability"));
  }
  for (const char* part : {"gen", "mine", "eval", "pcs", "vectors", "edit", "correlate", "stability"}) {
    const auto a = base / "jobs1" / part, b = base / "jobs8" / part;
    if (!fs::exists(a) || !fs::exists(b)) continue;
    const auto sa = snapshot(a), sb = snapshot(b);
    compared += sa.size();
    if (sa != sb) failed.push_back(std::string(part) + " differs");
  }
  std::string detail = std::to_string(compared) + " files compared across 8 commands";
  for (const auto& f : failed) detail += "; " + f;
  report("determinism", failed.empty() && compared > 0, detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: phonovec_acceptance <work-dir>\n";
    return 2;
  }
  g_work = argv[1];
  fs::remove_all(g_work);
  fs::create_directories(g_work);
  if (run("gen_synthetic", "gen-synthetic --seed 1 --out " + q(data())) != 0) {
    std::cout << "FAIL setup: gen-synthetic failed\n";
    return 1;
  }
  const std::pair<const char*, void (*)()> checks[] = {
      {"exact-analogy", exact_analogy},     {"null-corpus", null_corpus},
      {"mining-equivalence", mining_equivalence}, {"pooling", pooling},
      {"edit-contract", edit_contract},     {"dsp-oracles", dsp},
      {"correlation-rig", correlation_rig}, {"sample-efficiency", sample_efficiency_check},
      {"determinism", determinism}};
  for (const auto& [name, check] : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      report(name, false, std::string("exception: ") + e.what());
    }
  }
  return g_failures == 0 ? 0 : 1;
}
