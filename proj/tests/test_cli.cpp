#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>

#include "phonovec/commands.hpp"
#include "phonovec/io_util.hpp"
#include "phonovec/synthetic.hpp"
#include "phonovec/vector_lab.hpp"
#include "test_util.hpp"

using namespace phonovec;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "phonovec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void plosive_corpus(const fs::path& root) {
  synth::BankSpec spec;
  spec.phones = {"b", "p", "d", "t", "ɡ", "k"};
  spec.instances = 8;
  spec.sigma = 0.1;
  spec.n_layers = 2;
  spec.seed = 4;
  synth::write_bank_corpus(root, spec, FeatureTable::bundled());
}

}  // namespace

TEST(Cli, MineEmptyVocabulary) {
  TempDir dir;
  write_file_atomic(dir / "vocab.txt", "");
  const auto r = cli({"mine", "--vocab", "@" + (dir / "vocab.txt").string(), "--out",
                      (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("quadruplets: 0"), std::string::npos);
  EXPECT_EQ(read_file(dir / "out" / "quadruplets.jsonl"), "");
}

TEST(Cli, MineVocabularyList) {
  TempDir dir;
  const auto r = cli({"mine", "--vocab", "t,d,p,b", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = read_data_lines(read_file(dir / "quadruplets.jsonl"));
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_NE(lines[0].find("\"id\":\"b|d|p|t\""), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  TempDir dir;
  const auto table = cli({"mine", "--vocab", "b,p", "--table", "/no/such/table.tsv", "--out",
                          dir.path().string()});
  EXPECT_EQ(table.code, 2);
  EXPECT_NE(table.err.find("/no/such/table.tsv"), std::string::npos);
  EXPECT_EQ(cli({"mine", "--vocab", "b,zz", "--out", dir.path().string()}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"eval", "--n-samples", "0", "--dump", dir.path().string()}).code, 2);
  EXPECT_EQ(cli({"mine", "--config", "/no/such.conf"}).code, 2);
  plosive_corpus(dir / "corpus");
  EXPECT_EQ(cli({"pcs", "--dump", (dir / "corpus").string(), "--layers", "7", "--out",
                 (dir / "o").string()})
                .code,
            2);
  EXPECT_EQ(cli({"eval", "--dump", (dir / "corpus").string(), "--stratify", "by-moon",
                 "--min-occurrences", "1", "--out", (dir / "o").string()})
                .code,
            2);
}

TEST(Cli, RuntimeFailureExitsOne) {
  TempDir dir;
  fs::create_directories(dir / "d" / "reps");
  write_file_atomic(dir / "d" / "manifest.jsonl",
                    "{\"utterance_id\":\"u1\",\"phone\":\"b\",\"t_start\":0,\"t_end\":0.1}\n");
  const auto r = cli({"pcs", "--dump", (dir / "d").string(), "--min-occurrences", "1", "--out",
                      (dir / "o").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("u1"), std::string::npos);
}

TEST(Cli, SingleLayerEvalSummary) {
  TempDir dir;
  plosive_corpus(dir / "corpus");
  const auto r = cli({"eval", "--dump", (dir / "corpus").string(), "--layers", "1",
                      "--min-occurrences", "1", "--n-samples", "100", "--stratify", "cv-class",
                      "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir / "out" / "summary.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "layer");
  EXPECT_EQ(rows[1][0], "1");
  EXPECT_EQ(rows[1][1], "all");
  EXPECT_EQ(rows[2][1], "consonant");
  EXPECT_EQ(rows[2][2], rows[1][2]);
  EXPECT_TRUE(fs::exists(dir / "out" / "results_layer_01.jsonl"));
  EXPECT_FALSE(fs::exists(dir / "out" / "results_layer_00.jsonl"));
}

TEST(Cli, PlosiveBankYieldsOnlyVoicing) {
  TempDir dir;
  plosive_corpus(dir / "corpus");
  const auto r = cli({"vectors", "--dump", (dir / "corpus").string(), "--layers", "0",
                      "--min-occurrences", "1", "--repeats", "50", "--sizes", "1,8", "--bins",
                      "10", "--no-svg", "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto skipped = read_csv(dir / "out" / "skipped.csv");
  EXPECT_EQ(skipped.size(), 1u + 7u);
  EXPECT_EQ(read_data_lines(read_file(dir / "out" / "vectors.jsonl")).size(), 1u);
  const auto sim = read_csv(dir / "out" / "similarity.csv");
  ASSERT_EQ(sim.size(), 2u);
  EXPECT_EQ(sim[1][0], "voice");
  EXPECT_EQ(sim[1][1], "1");

  const auto hist = read_csv(dir / "out" / "sample_efficiency.csv");
  std::map<std::string, long> totals;
  for (std::size_t i = 1; i < hist.size(); ++i) totals[hist[i][1]] += std::stol(hist[i][4]);
  EXPECT_EQ(totals, (std::map<std::string, long>{{"1", 50}, {"8", 50}}));
  EXPECT_EQ(hist.size(), 1u + 2u * 10u);
  EXPECT_FALSE(fs::exists(dir / "out" / "sample_efficiency.svg"));
}

TEST(Cli, SimilarityMatrixIsSymmetric) {
  TempDir dir;
  synth::BankSpec spec;
  spec.phones = synth::noisy_phones();
  spec.instances = 6;
  spec.sigma = 0.3;
  spec.n_layers = 1;
  synth::write_bank_corpus(dir / "corpus", spec, FeatureTable::bundled());
  const auto r = cli({"vectors", "--dump", (dir / "corpus").string(), "--min-occurrences", "1",
                      "--repeats", "20", "--sizes", "2", "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sim = read_csv(dir / "out" / "similarity.csv");
  ASSERT_EQ(sim.size(), 9u);
  for (std::size_t i = 1; i < sim.size(); ++i) {
    ASSERT_EQ(sim[i].size(), 9u);
    EXPECT_EQ(sim[i][i], "1");
    EXPECT_EQ(sim[0][i], sim[i][0]);
    for (std::size_t j = 1; j < sim.size(); ++j) EXPECT_EQ(sim[i][j], sim[j][i]);
  }
  EXPECT_TRUE(fs::exists(dir / "out" / "sample_efficiency.svg"));
}

TEST(Cli, EditWritesDumpAndLog) {
  TempDir dir;
  plosive_corpus(dir / "corpus");
  const auto layer = (dir / "corpus" / "layer_00").string();
  ASSERT_EQ(cli({"vectors", "--dump", layer, "--min-occurrences", "1", "--features", "voi",
                 "--repeats", "5", "--sizes", "1", "--out", (dir / "v").string()})
                .code,
            0);
  const auto r = cli({"edit", "--dump", layer, "--vectors", (dir / "v" / "vectors.jsonl").string(),
                      "--feature", "voice", "--n-utts", "12", "--seed", "3", "--out",
                      (dir / "e").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto edits = read_edit_log(dir / "e" / "edits.jsonl");
  ASSERT_EQ(edits.size(), 12u);
  RepDump edited(dir / "e" / "edited");
  EXPECT_EQ(edited.utterance_ids().size(), 12u);
  RepDump source(layer);
  const auto& e = edits[5];
  const auto before = source.load(e.utterance_id);
  const auto after = edited.load(e.edit_id);
  ASSERT_EQ(before.frames(), after.frames());
  for (Eigen::Index t = 0; t < before.frames(); ++t) {
    const bool inside = t >= e.frames.begin && t < e.frames.end;
    EXPECT_EQ(before.data.row(t) == after.data.row(t), !inside || e.lambda == 0.0) << t;
  }
  EXPECT_EQ(cli({"edit", "--dump", layer, "--vectors", (dir / "v" / "vectors.jsonl").string(),
                 "--feature", "nas", "--out", (dir / "e2").string()})
                .code,
            2);
}

TEST(Cli, IdentityEditsSwitchCorrelateToStability) {
  TempDir dir;
  synth::write_stability_batch(dir / "s", 8, 2);
  const auto r = cli({"correlate", "--edits", (dir / "s" / "edits.jsonl").string(),
                      "--orig-audio", (dir / "s" / "orig").string(), "--edited-audio",
                      (dir / "s" / "resynth").string(), "--no-svg", "--out",
                      (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "stability.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "stability_density.csv"));
  EXPECT_FALSE(fs::exists(dir / "out" / "correlation.csv"));
  for (const auto& entry : fs::directory_iterator(dir / "out")) {
    EXPECT_EQ(entry.path().extension(), ".csv") << entry.path();
  }
  const auto rows = read_csv(dir / "out" / "stability.csv");
  EXPECT_EQ(rows.size(), 6u);
}

TEST(Cli, CorrelateRig) {
  TempDir dir;
  synth::write_correlation_rig(dir / "rig", 10, 1);
  const auto r = cli({"correlate", "--edits", (dir / "rig" / "edits.jsonl").string(),
                      "--orig-audio", (dir / "rig" / "orig").string(), "--edited-audio",
                      (dir / "rig" / "edited").string(), "--min-pairs", "5", "--out",
                      (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir / "out" / "correlation.csv");
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0][5], "rho");
  EXPECT_TRUE(fs::exists(dir / "out" / "scatter_voice.svg"));
  EXPECT_EQ(read_csv(dir / "out" / "scatter.csv")[0][3], "edit_id");
}

TEST(Cli, SubprocessAndHelp) {
  TempDir dir;
  const std::string cmd = std::string(PHONOVEC_CLI) + " --out " + dir.path().string() +
                          " mine --vocab b,p,d,t > " + (dir / "log.txt").string();
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir / "quadruplets.jsonl"));
  const std::string bad = std::string(PHONOVEC_CLI) + " mine --bogus 2> /dev/null";
  const int status = std::system(bad.c_str());
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}
