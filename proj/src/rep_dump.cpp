#include "phonovec/rep_dump.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "phonovec/error.hpp"
#include "phonovec/io_util.hpp"

namespace phonovec {

static_assert(std::endian::native == std::endian::little,
              ".s3mr I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic{'S', '3', 'M', 'R'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T take(const char* bytes) {
  T value;
  std::memcpy(&value, bytes, sizeof value);
  return value;
}

}  // namespace

void write_s3mr(std::ostream& out, const RepresentationMatrix& rep) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint16_t>(out, 1);
  put<std::uint16_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(rep.data.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(rep.data.cols()));
  put<std::uint32_t>(out, rep.stride_samples);
  put<std::uint32_t>(out, rep.sample_rate);
  out.write(reinterpret_cast<const char*>(rep.data.data()),
            static_cast<std::streamsize>(rep.data.size() * sizeof(float)));
}

void write_s3mr(const std::filesystem::path& path, const RepresentationMatrix& rep) {
  std::ostringstream buf;
  write_s3mr(buf, rep);
  write_file_atomic(path, buf.str());
}

S3mrHeader read_s3mr_header(std::istream& in) {
  std::array<char, kS3mrHeaderBytes> bytes{};
  in.read(bytes.data(), bytes.size());
  if (in.gcount() < 4 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(Errc::BadMagic, "not an .s3mr stream (bad magic)");
  }
  if (static_cast<std::size_t>(in.gcount()) < bytes.size()) {
    throw Error(Errc::Truncated, ".s3mr header is truncated");
  }
  S3mrHeader h;
  h.version = take<std::uint16_t>(bytes.data() + 4);
  h.dtype = take<std::uint16_t>(bytes.data() + 6);
  h.rows = take<std::uint32_t>(bytes.data() + 8);
  h.cols = take<std::uint32_t>(bytes.data() + 12);
  h.stride_samples = take<std::uint32_t>(bytes.data() + 16);
  h.sample_rate = take<std::uint32_t>(bytes.data() + 20);
  if (h.version != 1) {
    throw Error(Errc::VersionMismatch,
                ".s3mr version " + std::to_string(h.version) + " is not supported");
  }
  if (h.dtype != 1) {
    throw Error(Errc::UnsupportedDtype,
                ".s3mr dtype " + std::to_string(h.dtype) + " is not float32");
  }
  if (h.rows == 0 || h.cols == 0) {
    throw Error(Errc::Parse, ".s3mr matrix must have at least one row and column");
  }
  if (h.stride_samples == 0 || h.sample_rate == 0) {
    throw Error(Errc::Parse, ".s3mr stride and sample rate must be positive");
  }
  return h;
}

RepresentationMatrix read_s3mr(std::istream& in) {
  const S3mrHeader h = read_s3mr_header(in);
  RepresentationMatrix rep;
  rep.stride_samples = h.stride_samples;
  rep.sample_rate = h.sample_rate;
  rep.data.resize(h.rows, h.cols);
  const auto bytes = static_cast<std::streamsize>(rep.data.size() * sizeof(float));
  in.read(reinterpret_cast<char*>(rep.data.data()), bytes);
  if (in.gcount() != bytes) {
    throw Error(Errc::Truncated, ".s3mr payload is truncated");
  }
  if (!rep.data.allFinite()) {
    throw Error(Errc::NonFinite, ".s3mr payload contains non-finite values");
  }
  return rep;
}

RepresentationMatrix read_s3mr(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  try {
    return read_s3mr(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

S3mrHeader read_s3mr_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  try {
    return read_s3mr_header(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<SegmentRecord> parse_manifest(std::istream& in) {
  std::vector<SegmentRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SegmentRecord seg;
      seg.utterance_id = j.at("utterance_id").get<std::string>();
      seg.phone = j.at("phone").get<std::string>();
      seg.t_start = j.at("t_start").get<double>();
      seg.t_end = j.at("t_end").get<double>();
      seg.speaker_id = j.value("speaker_id", std::string{});
      if (j.contains("language") && !j["language"].is_null()) {
        seg.language = j["language"].get<std::string>();
      }
      if (seg.phone.empty() || seg.utterance_id.empty()) {
        throw Error(Errc::Parse, "empty utterance_id or phone");
      }
      if (!(seg.t_start >= 0.0) || !(seg.t_end > seg.t_start)) {
        throw Error(Errc::Parse, "segment needs 0 <= t_start < t_end");
      }
      out.push_back(std::move(seg));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::Parse, "manifest line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<SegmentRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open manifest " + path.string());
  return parse_manifest(in);
}

std::string manifest_line(const SegmentRecord& seg) {
  nlohmann::ordered_json j;
  j["utterance_id"] = seg.utterance_id;
  j["phone"] = seg.phone;
  j["t_start"] = seg.t_start;
  j["t_end"] = seg.t_end;
  j["speaker_id"] = seg.speaker_id;
  j["language"] = seg.language;
  return j.dump();
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<SegmentRecord>& segments) {
  std::string text;
  for (const auto& seg : segments) text += manifest_line(seg) + "\n";
  write_file_atomic(path, text);
}

RepDump::RepDump(std::filesystem::path root, int layer_index, std::string model_id)
    : root_(std::move(root)), layer_index_(layer_index), model_id_(std::move(model_id)) {
  if (!std::filesystem::is_directory(root_)) {
    throw Error(Errc::Io, "dump directory " + root_.string() + " does not exist");
  }
  manifest_ = read_manifest(root_ / "manifest.jsonl");
}

std::vector<std::string> RepDump::utterance_ids() const {
  std::set<std::string> ids;
  for (const auto& seg : manifest_) ids.insert(seg.utterance_id);
  return {ids.begin(), ids.end()};
}

std::filesystem::path RepDump::rep_path(const std::string& utterance_id) const {
  return root_ / "reps" / (utterance_id + ".s3mr");
}

bool RepDump::has_utterance(const std::string& utterance_id) const {
  return std::filesystem::is_regular_file(rep_path(utterance_id));
}

RepresentationMatrix RepDump::load(const std::string& utterance_id) const {
  if (!has_utterance(utterance_id)) {
    throw Error(Errc::MissingUtterance,
                "utterance '" + utterance_id + "' has no matrix in " + root_.string());
  }
  auto rep = read_s3mr(rep_path(utterance_id));
  rep.layer_index = layer_index_;
  rep.model_id = model_id_;
  return rep;
}

S3mrHeader RepDump::header(const std::string& utterance_id) const {
  if (!has_utterance(utterance_id)) {
    throw Error(Errc::MissingUtterance,
                "utterance '" + utterance_id + "' has no matrix in " + root_.string());
  }
  return read_s3mr_header(rep_path(utterance_id));
}

RepDump::Cursor::Cursor(const RepDump& dump) : dump_(&dump), ids_(dump.utterance_ids()) {}

std::optional<std::pair<std::string, RepresentationMatrix>> RepDump::Cursor::next() {
  if (pos_ >= ids_.size()) return std::nullopt;
  const std::string& id = ids_[pos_++];
  return std::make_pair(id, dump_->load(id));
}

void write_rep_dump(const std::filesystem::path& root,
                    const std::vector<SegmentRecord>& manifest,
                    const std::vector<std::pair<std::string, RepresentationMatrix>>& reps) {
  std::filesystem::create_directories(root / "reps");
  for (const auto& [id, rep] : reps) write_s3mr(root / "reps" / (id + ".s3mr"), rep);
  write_manifest(root / "manifest.jsonl", manifest);
}

}  // namespace phonovec
