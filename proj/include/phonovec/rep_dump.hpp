#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace phonovec {

/// Frame-major representation matrix as stored on disk: T' rows, F columns.
using FrameMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct RepresentationMatrix {
  FrameMatrix data;
  std::uint32_t stride_samples = 320;
  std::uint32_t sample_rate = 16000;
  int layer_index = 0;
  std::string model_id;

  Eigen::Index frames() const { return data.rows(); }
  Eigen::Index dims() const { return data.cols(); }
};

struct S3mrHeader {
  std::uint16_t version = 1;
  std::uint16_t dtype = 1;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t stride_samples = 0;
  std::uint32_t sample_rate = 0;
};

inline constexpr std::size_t kS3mrHeaderBytes = 24;

// .s3mr layout, little-endian: "S3MR", u16 version (1), u16 dtype (1 =
// float32), u32 rows, u32 cols, u32 stride_samples, u32 sample_rate, then
// rows*cols float32 values in row-major order.
void write_s3mr(std::ostream& out, const RepresentationMatrix& rep);
void write_s3mr(const std::filesystem::path& path, const RepresentationMatrix& rep);
RepresentationMatrix read_s3mr(std::istream& in);
RepresentationMatrix read_s3mr(const std::filesystem::path& path);
S3mrHeader read_s3mr_header(std::istream& in);
S3mrHeader read_s3mr_header(const std::filesystem::path& path);

struct SegmentRecord {
  std::string utterance_id;
  std::string phone;
  double t_start = 0.0;
  double t_end = 0.0;
  std::string speaker_id;
  std::string language;
};

std::vector<SegmentRecord> parse_manifest(std::istream& in);
std::vector<SegmentRecord> read_manifest(const std::filesystem::path& path);
std::string manifest_line(const SegmentRecord& seg);
void write_manifest(const std::filesystem::path& path,
                    const std::vector<SegmentRecord>& segments);

/// A dump directory: `manifest.jsonl` plus `reps/<utterance_id>.s3mr`.
class RepDump {
 public:
  explicit RepDump(std::filesystem::path root, int layer_index = 0,
                   std::string model_id = {});

  const std::filesystem::path& root() const { return root_; }
  const std::vector<SegmentRecord>& manifest() const { return manifest_; }
  int layer_index() const { return layer_index_; }
  const std::string& model_id() const { return model_id_; }

  /// Sorted, unique utterance ids referenced by the manifest.
  std::vector<std::string> utterance_ids() const;
  std::filesystem::path rep_path(const std::string& utterance_id) const;
  bool has_utterance(const std::string& utterance_id) const;
  RepresentationMatrix load(const std::string& utterance_id) const;
  S3mrHeader header(const std::string& utterance_id) const;

  /// Streams matrices one at a time, in utterance-id order.
  class Cursor {
   public:
    explicit Cursor(const RepDump& dump);
    std::optional<std::pair<std::string, RepresentationMatrix>> next();

   private:
    const RepDump* dump_;
    std::vector<std::string> ids_;
    std::size_t pos_ = 0;
  };
  Cursor stream() const { return Cursor(*this); }

 private:
  std::filesystem::path root_;
  int layer_index_;
  std::string model_id_;
  std::vector<SegmentRecord> manifest_;
};

/// Creates `root/reps` and writes the manifest and matrices.
void write_rep_dump(const std::filesystem::path& root,
                    const std::vector<SegmentRecord>& manifest,
                    const std::vector<std::pair<std::string, RepresentationMatrix>>& reps);

}  // namespace phonovec
