#include "phonovec/corpus.hpp"

#include <algorithm>
#include <tuple>

#include "phonovec/embedded_data.hpp"
#include "phonovec/io_util.hpp"

namespace phonovec {

namespace {

// t * rate / stride, snapped to an integer when it is one up to rounding
// noise (0.18 s * 50 Hz must give frame 9, not 9.000000000000002).
double frame_position(double t, std::uint32_t stride, std::uint32_t rate) {
  const double x = t * static_cast<double>(rate) / static_cast<double>(stride);
  const double nearest = std::round(x);
  return std::abs(x - nearest) < 1e-9 * std::max(1.0, std::abs(x)) ? nearest : x;
}

constexpr double kAdjacencyTolerance = 1e-4;

}  // namespace

FrameRange frame_range(double t_start, double t_end, std::uint32_t stride_samples,
                       std::uint32_t sample_rate, Eigen::Index frames) {
  const auto begin = static_cast<Eigen::Index>(
      std::floor(frame_position(t_start, stride_samples, sample_rate)));
  auto end = static_cast<Eigen::Index>(
      std::ceil(frame_position(t_end, stride_samples, sample_rate)));
  if (begin < 0 || begin >= frames) {
    throw Error(Errc::SegmentOutOfRange,
                "segment starting at frame " + std::to_string(begin) +
                    " lies beyond the matrix (" + std::to_string(frames) + " frames)");
  }
  end = std::min(end, frames);
  if (end <= begin) end = begin + 1;
  return {begin, end};
}

Eigen::VectorXd slice_and_pool(const RepresentationMatrix& rep, const SegmentRecord& seg) {
  return average_pool(rep.data, frame_range(seg, rep));
}

std::set<std::string, std::less<>> parse_label_set(std::string_view text) {
  std::set<std::string, std::less<>> out;
  for (const auto& line : read_data_lines(text)) out.insert(line);
  return out;
}

std::multimap<std::string, std::string, std::less<>> parse_merge_map(std::string_view text) {
  std::multimap<std::string, std::string, std::less<>> out;
  for (const auto& line : read_data_lines(text)) {
    auto cells = split(line, '\t');
    if (cells.size() != 2) {
      throw Error(Errc::Parse, "merge map line '" + line + "' needs closure<TAB>release");
    }
    out.emplace(std::string(trim(cells[0])), std::string(trim(cells[1])));
  }
  return out;
}

std::map<std::string, std::string, std::less<>> parse_label_map(std::string_view text) {
  std::map<std::string, std::string, std::less<>> out;
  for (const auto& line : read_data_lines(text)) {
    auto cells = split(line, '\t');
    if (cells.size() != 2) {
      throw Error(Errc::Parse, "label map line '" + line + "' needs from<TAB>to");
    }
    out[std::string(trim(cells[0]))] = std::string(trim(cells[1]));
  }
  return out;
}

BankFilters timit_filters() {
  BankFilters f;
  f.diphthongs = parse_label_set(embedded::timit_diphthongs());
  f.closure_merge = parse_merge_map(embedded::timit_closure_merge());
  f.label_map = parse_label_map(embedded::timit_ipa_map());
  return f;
}

std::vector<SegmentRecord> apply_segment_rules(std::vector<SegmentRecord> segments,
                                               const BankFilters& filters) {
  std::sort(segments.begin(), segments.end(), [](const auto& a, const auto& b) {
    return std::tie(a.utterance_id, a.t_start, a.t_end, a.phone) <
           std::tie(b.utterance_id, b.t_start, b.t_end, b.phone);
  });
  std::vector<SegmentRecord> merged;
  merged.reserve(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    SegmentRecord seg = segments[i];
    if (i + 1 < segments.size()) {
      const auto& nxt = segments[i + 1];
      const auto [lo, hi] = filters.closure_merge.equal_range(seg.phone);
      const bool releases = std::any_of(lo, hi, [&](const auto& kv) {
        return kv.second == nxt.phone;
      });
      if (releases && nxt.utterance_id == seg.utterance_id &&
          std::abs(nxt.t_start - seg.t_end) <= kAdjacencyTolerance) {
        seg.phone = nxt.phone;
        seg.t_end = nxt.t_end;
        ++i;
      }
    }
    if (filters.diphthongs.count(seg.phone) != 0) continue;
    if (auto it = filters.label_map.find(seg.phone); it != filters.label_map.end()) {
      seg.phone = it->second;
    }
    if (!filters.keep_only.empty() && filters.keep_only.count(seg.phone) == 0) continue;
    merged.push_back(std::move(seg));
  }
  return merged;
}

PhoneBank PhoneBank::from_matrices(std::map<std::string, Eigen::MatrixXd> phones) {
  if (phones.empty()) throw Error(Errc::NoSegments, "phone bank needs at least one phone");
  PhoneBank bank(phones.begin()->second.cols());
  for (auto& [phone, m] : phones) {
    std::vector<SegmentOrigin> origins(static_cast<std::size_t>(m.rows()));
    for (std::size_t i = 0; i < origins.size(); ++i) {
      origins[i] = {phone + "#" + std::to_string(i), 0.0, 0.0};
    }
    bank.add(phone, std::move(m), std::move(origins));
  }
  return bank;
}

void PhoneBank::add(const std::string& phone, Eigen::MatrixXd vectors,
                    std::vector<SegmentOrigin> origins) {
  if (vectors.cols() != dims_) {
    throw Error(Errc::LengthMismatch, "bank vectors for '" + phone + "' have " +
                                          std::to_string(vectors.cols()) + " dims, expected " +
                                          std::to_string(dims_));
  }
  if (static_cast<Eigen::Index>(origins.size()) != vectors.rows()) {
    throw Error(Errc::LengthMismatch, "one origin per bank vector is required");
  }
  if (vectors.rows() == 0) return;
  entries_[phone] = Entry{std::move(vectors), std::move(origins)};
}

std::vector<std::string> PhoneBank::phones() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& entry : entries_) out.push_back(entry.first);
  return out;
}

bool PhoneBank::contains(std::string_view phone) const {
  return entries_.find(phone) != entries_.end();
}

const Eigen::MatrixXd& PhoneBank::instances(std::string_view phone) const {
  auto it = entries_.find(phone);
  if (it == entries_.end()) {
    throw Error(Errc::MissingPhone, "phone '" + std::string(phone) + "' is not in the bank");
  }
  return it->second.vectors;
}

const std::vector<SegmentOrigin>& PhoneBank::origins(std::string_view phone) const {
  auto it = entries_.find(phone);
  if (it == entries_.end()) {
    throw Error(Errc::MissingPhone, "phone '" + std::string(phone) + "' is not in the bank");
  }
  return it->second.origins;
}

Eigen::VectorXd PhoneBank::mean(std::string_view phone) const {
  return instances(phone).colwise().mean().transpose();
}

std::size_t PhoneBank::total_instances() const {
  std::size_t n = 0;
  for (const auto& entry : entries_) n += static_cast<std::size_t>(entry.second.vectors.rows());
  return n;
}

PhoneBank PhoneBank::subset(const std::vector<std::string>& phones) const {
  PhoneBank out(dims_);
  out.layer_index = layer_index;
  out.model_id = model_id;
  out.id = id;
  out.filter_summary = filter_summary;
  for (const auto& p : phones) {
    auto it = entries_.find(p);
    if (it != entries_.end()) out.entries_.emplace(it->first, it->second);
  }
  return out;
}

PhoneBank build_phone_bank(const RepDump& dump, const BankFilters& filters, int jobs) {
  const auto segments = apply_segment_rules(dump.manifest(), filters);

  // Group by utterance, preserving the (utterance_id, t_start) order.
  std::vector<std::pair<std::string, std::vector<const SegmentRecord*>>> groups;
  for (const auto& seg : segments) {
    if (groups.empty() || groups.back().first != seg.utterance_id) {
      groups.emplace_back(seg.utterance_id, std::vector<const SegmentRecord*>{});
    }
    groups.back().second.push_back(&seg);
  }
  for (const auto& [utt, segs] : groups) {
    if (!dump.has_utterance(utt)) {
      throw Error(Errc::MissingUtterance, "manifest references utterance '" + utt +
                                              "' with no matrix in " + dump.root().string());
    }
  }

  std::vector<std::vector<Eigen::VectorXd>> pooled(groups.size());
  std::vector<Eigen::Index> dims(groups.size(), 0);
  parallel_for(groups.size(), jobs, [&](std::size_t g) {
    const auto rep = dump.load(groups[g].first);
    dims[g] = rep.dims();
    pooled[g].reserve(groups[g].second.size());
    for (const SegmentRecord* seg : groups[g].second) {
      pooled[g].push_back(slice_and_pool(rep, *seg));
    }
  });

  std::map<std::string, std::vector<std::pair<const SegmentRecord*, const Eigen::VectorXd*>>>
      by_phone;
  Eigen::Index F = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (F == 0) F = dims[g];
    if (dims[g] != F) {
      throw Error(Errc::LengthMismatch, "utterance '" + groups[g].first +
                                            "' has a different feature dimension");
    }
    for (std::size_t k = 0; k < groups[g].second.size(); ++k) {
      by_phone[groups[g].second[k]->phone].emplace_back(groups[g].second[k], &pooled[g][k]);
    }
  }

  PhoneBank bank(F);
  bank.layer_index = dump.layer_index();
  bank.model_id = dump.model_id();
  bank.id = dump.root().string();
  bank.filter_summary = "min_occurrences=" + std::to_string(filters.min_occurrences) +
                        ";diphthongs=" + std::to_string(filters.diphthongs.size()) +
                        ";merge_rules=" + std::to_string(filters.closure_merge.size());
  for (auto& [phone, items] : by_phone) {
    if (static_cast<int>(items.size()) < filters.min_occurrences) continue;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(items.size()), F);
    std::vector<SegmentOrigin> origins;
    origins.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
      m.row(static_cast<Eigen::Index>(i)) = items[i].second->transpose();
      origins.push_back({items[i].first->utterance_id, items[i].first->t_start,
                         items[i].first->t_end});
    }
    bank.add(phone, std::move(m), std::move(origins));
  }
  if (bank.num_phones() == 0) {
    throw Error(Errc::NoSegments, "no phone reached " +
                                      std::to_string(filters.min_occurrences) +
                                      " occurrences in " + dump.root().string());
  }
  return bank;
}

}  // namespace phonovec
