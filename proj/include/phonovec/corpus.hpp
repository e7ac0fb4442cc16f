#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "phonovec/error.hpp"
#include "phonovec/rep_dump.hpp"

namespace phonovec {

/// Half-open frame interval [begin, end).
struct FrameRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;

  Eigen::Index size() const { return end - begin; }
  bool operator==(const FrameRange&) const = default;
};

/// begin = floor(t_start * rate / stride), end = ceil(t_end * rate / stride),
/// end clamped to `frames`. A segment shorter than one frame after
/// downsampling maps to the single frame at `begin`.
FrameRange frame_range(double t_start, double t_end, std::uint32_t stride_samples,
                       std::uint32_t sample_rate, Eigen::Index frames);

inline FrameRange frame_range(const SegmentRecord& seg, const RepresentationMatrix& rep) {
  return frame_range(seg.t_start, seg.t_end, rep.stride_samples, rep.sample_rate,
                     rep.frames());
}

/// Column-wise mean of rows [range.begin, range.end), accumulated in double.
template <typename Derived>
Eigen::VectorXd average_pool(const Eigen::MatrixBase<Derived>& frames, FrameRange range) {
  if (range.begin < 0 || range.end > frames.rows() || range.begin >= range.end) {
    throw Error(Errc::EmptySlice, "pooling range is empty or outside the matrix");
  }
  return frames.middleRows(range.begin, range.size())
             .template cast<double>()
             .colwise()
             .sum()
             .transpose() /
         static_cast<double>(range.size());
}

/// Feature slicing followed by average pooling.
Eigen::VectorXd slice_and_pool(const RepresentationMatrix& rep, const SegmentRecord& seg);

/// Label rewriting applied while a bank is assembled.
struct BankFilters {
  int min_occurrences = 50;
  std::set<std::string, std::less<>> diphthongs;
  /// closure label -> release labels it fuses with.
  std::multimap<std::string, std::string, std::less<>> closure_merge;
  /// Optional relabeling (e.g. corpus symbols to feature-table labels),
  /// applied after merging and diphthong removal.
  std::map<std::string, std::string, std::less<>> label_map;
  /// Keep only phones present in this set when non-empty.
  std::set<std::string, std::less<>> keep_only;
};

std::set<std::string, std::less<>> parse_label_set(std::string_view text);
std::multimap<std::string, std::string, std::less<>> parse_merge_map(std::string_view text);
std::map<std::string, std::string, std::less<>> parse_label_map(std::string_view text);
/// Shipped TIMIT conventions.
BankFilters timit_filters();

/// Fuses (closure, release) neighbours and drops diphthongs; input order is
/// irrelevant, output is sorted by (utterance_id, t_start).
std::vector<SegmentRecord> apply_segment_rules(std::vector<SegmentRecord> segments,
                                               const BankFilters& filters);

struct SegmentOrigin {
  std::string utterance_id;
  double t_start = 0.0;
  double t_end = 0.0;
};

/// Phone label -> pooled instance vectors (one row per segment).
class PhoneBank {
 public:
  struct Entry {
    Eigen::MatrixXd vectors;  // instances x F
    std::vector<SegmentOrigin> origins;
  };

  PhoneBank() = default;
  explicit PhoneBank(Eigen::Index dims) : dims_(dims) {}

  /// Builds a bank directly from per-phone instance matrices.
  static PhoneBank from_matrices(std::map<std::string, Eigen::MatrixXd> phones);

  void add(const std::string& phone, Eigen::MatrixXd vectors,
           std::vector<SegmentOrigin> origins);

  Eigen::Index dims() const { return dims_; }
  std::size_t num_phones() const { return entries_.size(); }
  std::vector<std::string> phones() const;
  bool contains(std::string_view phone) const;
  const Eigen::MatrixXd& instances(std::string_view phone) const;
  const std::vector<SegmentOrigin>& origins(std::string_view phone) const;
  Eigen::Index count(std::string_view phone) const { return instances(phone).rows(); }
  Eigen::VectorXd mean(std::string_view phone) const;
  std::size_t total_instances() const;
  const std::map<std::string, Entry, std::less<>>& entries() const { return entries_; }

  /// Same bank restricted to the given phones (missing ones are ignored).
  PhoneBank subset(const std::vector<std::string>& phones) const;

  int layer_index = 0;
  std::string model_id;
  std::string id;
  std::string filter_summary;

 private:
  Eigen::Index dims_ = 0;
  std::map<std::string, Entry, std::less<>> entries_;
};

PhoneBank build_phone_bank(const RepDump& dump, const BankFilters& filters, int jobs = 1);

}  // namespace phonovec
