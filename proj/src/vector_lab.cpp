#include "phonovec/vector_lab.hpp"

#include <cstring>
#include <fstream>

#include "phonovec/error.hpp"
#include "phonovec/io_util.hpp"
#include "phonovec/random.hpp"
#include "phonovec/stats.hpp"

namespace phonovec {

namespace {

struct SideStats {
  Eigen::VectorXd mean;
  std::size_t count = 0;
};

SideStats side_mean(const PhoneBank& bank, std::span<const std::string> phones,
                    SideWeighting weighting) {
  SideStats s{Eigen::VectorXd::Zero(bank.dims()), 0};
  for (const auto& p : phones) {
    const auto& m = bank.instances(p);
    s.count += static_cast<std::size_t>(m.rows());
    if (weighting == SideWeighting::Instance) {
      s.mean += m.colwise().sum().transpose();
    } else {
      s.mean += m.colwise().mean().transpose();
    }
  }
  if (weighting == SideWeighting::Instance) {
    s.mean /= static_cast<double>(s.count);
  } else {
    s.mean /= static_cast<double>(phones.size());
  }
  return s;
}

// Rows of all instances of the given phones stacked into one matrix.
Eigen::MatrixXd stack_instances(const PhoneBank& bank, std::span<const std::string> phones) {
  Eigen::Index rows = 0;
  for (const auto& p : phones) rows += bank.count(p);
  Eigen::MatrixXd out(rows, bank.dims());
  Eigen::Index at = 0;
  for (const auto& p : phones) {
    const auto& m = bank.instances(p);
    out.middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  return out;
}

}  // namespace

FeatureSides feature_sides(const PhoneBank& bank, const FeatureTable& table,
                           std::string_view feature, PhoneClass cls) {
  const Eigen::Index idx = table.feature_index(feature);
  FeatureSides sides;
  for (const auto& p : bank.phones()) {
    if (!table.contains(p) || phone_class(p, table) != cls) continue;
    const int v = table.ternary(p)[idx];
    if (v > 0) sides.positive.push_back(p);
    if (v < 0) sides.negative.push_back(p);
  }
  return sides;
}

PhonologicalVector extract_vector(const PhoneBank& bank, const FeatureTable& table,
                                  std::string_view feature, PhoneClass cls,
                                  SideWeighting weighting) {
  const auto sides = feature_sides(bank, table, feature, cls);
  if (sides.positive.empty() || sides.negative.empty()) {
    throw Error(Errc::EmptySide, "feature '" + std::string(feature) + "' has no " +
                                     std::string(sides.positive.empty() ? "positive" : "negative") +
                                     " " + std::string(to_string(cls)) + "s in the bank");
  }
  const auto pos = side_mean(bank, sides.positive, weighting);
  const auto neg = side_mean(bank, sides.negative, weighting);
  PhonologicalVector v;
  v.feature = canonical_feature_name(feature);
  v.phone_class = cls;
  v.direction = pos.mean - neg.mean;
  v.n_pos = pos.count;
  v.n_neg = neg.count;
  v.bank_id = bank.id;
  return v;
}

RepresentationMatrix apply_edit(const RepresentationMatrix& rep, const EditSpec& spec,
                                const PhonologicalVector& vec) {
  if (vec.dims() != rep.dims()) {
    throw Error(Errc::LengthMismatch, "vector has " + std::to_string(vec.dims()) +
                                          " dims, matrix has " + std::to_string(rep.dims()));
  }
  const FrameRange r = spec.frames;
  if (r.begin < 0 || r.end > rep.frames() || r.begin >= r.end) {
    throw Error(Errc::RangeOutOfBounds, "edit range [" + std::to_string(r.begin) + ", " +
                                            std::to_string(r.end) + ") is outside " +
                                            std::to_string(rep.frames()) + " frames");
  }
  RepresentationMatrix out = rep;
  if (spec.lambda == 0.0) return out;
  const Eigen::RowVectorXf step = (spec.lambda * vec.direction).cast<float>().transpose();
  out.data.middleRows(r.begin, r.size()).rowwise() += step;
  return out;
}

std::map<int, std::vector<double>> sample_efficiency(const PhoneBank& bank,
                                                     const FeatureTable& table,
                                                     std::string_view feature,
                                                     PhoneClass cls, std::span<const int> Ns,
                                                     int repeats, std::uint64_t seed) {
  const auto full = extract_vector(bank, table, feature, cls);
  const auto sides = feature_sides(bank, table, feature, cls);
  const Eigen::MatrixXd pos = stack_instances(bank, sides.positive).transpose();
  const Eigen::MatrixXd neg = stack_instances(bank, sides.negative).transpose();
  std::map<int, std::vector<double>> out;
  for (int n : Ns) {
    if (n < 1) throw Error(Errc::InvalidConfig, "sample sizes must be positive");
    Rng rng(derive_seed(seed, fnv1a64(full.feature), static_cast<std::uint64_t>(n),
                        static_cast<std::uint64_t>(cls)));
    auto& cosines = out[n];
    cosines.reserve(static_cast<std::size_t>(repeats));
    Eigen::VectorXd acc(bank.dims());
    for (int r = 0; r < repeats; ++r) {
      acc.setZero();
      for (int k = 0; k < n; ++k) {
        acc += pos.col(static_cast<Eigen::Index>(draw_index(rng, pos.cols())));
      }
      for (int k = 0; k < n; ++k) {
        acc -= neg.col(static_cast<Eigen::Index>(draw_index(rng, neg.cols())));
      }
      cosines.push_back(cosine(acc, full.direction));
    }
  }
  return out;
}

SinglePairVector single_pair_vector(const PhoneBank& bank, const FeatureTable& table,
                                    std::string_view feature, PhoneClass cls,
                                    const std::string& p_pos, const std::string& p_neg) {
  for (const auto* p : {&p_pos, &p_neg}) {
    if (!bank.contains(*p)) {
      throw Error(Errc::UnknownPhone, "phone '" + *p + "' is not in the bank");
    }
  }
  SinglePairVector out;
  out.vector.feature = canonical_feature_name(feature);
  out.vector.phone_class = cls;
  out.vector.direction = bank.mean(p_pos) - bank.mean(p_neg);
  out.vector.n_pos = static_cast<std::size_t>(bank.count(p_pos));
  out.vector.n_neg = static_cast<std::size_t>(bank.count(p_neg));
  out.vector.bank_id = bank.id;
  const auto full = extract_vector(bank, table, feature, cls);
  out.cosine_to_full = cosine(out.vector.direction, full.direction);
  return out;
}

Eigen::MatrixXd vector_similarity_matrix(std::span<const PhonologicalVector> vectors) {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  for (const auto& v : vectors) {
    if (v.dims() != vectors.front().dims()) {
      throw Error(Errc::LengthMismatch, "vectors differ in dimension");
    }
    if (v.direction.norm() == 0.0) {
      throw Error(Errc::ZeroVector, "vector '" + v.feature + "' is zero");
    }
  }
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      m(i, j) = m(j, i) = cosine(vectors[static_cast<std::size_t>(i)].direction,
                                 vectors[static_cast<std::size_t>(j)].direction);
    }
  }
  return m;
}

std::vector<EditSpec> plan_edit_batch(std::span<const SegmentRecord> segments,
                                      const FeatureTable& table,
                                      const PhonologicalVector& vec,
                                      const GeometryLookup& geometry,
                                      const EditBatchConfig& cfg) {
  if (cfg.n_utts < 0 || cfg.lambda_min > cfg.lambda_max) {
    throw Error(Errc::InvalidConfig, "edit batch needs n_utts >= 0 and lambda_min <= lambda_max");
  }
  const Eigen::Index idx = table.feature_index(vec.feature);
  std::vector<const SegmentRecord*> eligible;
  for (const auto& seg : segments) {
    if (!table.contains(seg.phone)) continue;
    if (phone_class(seg.phone, table) != vec.phone_class) continue;
    if (table.ternary(seg.phone)[idx] == 0) continue;
    eligible.push_back(&seg);
  }
  if (eligible.empty()) {
    throw Error(Errc::NoEligibleSegments, "no " + std::string(to_string(vec.phone_class)) +
                                              " segment defines feature '" + vec.feature + "'");
  }
  Rng rng(derive_seed(cfg.seed, fnv1a64(vec.feature), static_cast<std::uint64_t>(vec.phone_class)));
  std::map<std::string, UtteranceGeometry> cache;
  std::vector<EditSpec> out;
  out.reserve(static_cast<std::size_t>(cfg.n_utts));
  for (int i = 0; i < cfg.n_utts; ++i) {
    const SegmentRecord& seg = *eligible[draw_index(rng, eligible.size())];
    const double lambda = cfg.lambda_min + (cfg.lambda_max - cfg.lambda_min) * draw_unit(rng);
    auto it = cache.find(seg.utterance_id);
    if (it == cache.end()) it = cache.emplace(seg.utterance_id, geometry(seg.utterance_id)).first;
    const auto& g = it->second;
    EditSpec e;
    char id[32];
    std::snprintf(id, sizeof id, "e%06d", i);
    e.edit_id = id;
    e.utterance_id = seg.utterance_id;
    e.phone = seg.phone;
    e.t_start = seg.t_start;
    e.t_end = seg.t_end;
    e.frames = frame_range(seg.t_start, seg.t_end, g.stride_samples, g.sample_rate, g.frames);
    e.feature = vec.feature;
    e.phone_class = vec.phone_class;
    e.lambda = lambda;
    out.push_back(std::move(e));
  }
  return out;
}

nlohmann::ordered_json to_json(const PhonologicalVector& v) {
  std::vector<float> f(static_cast<std::size_t>(v.dims()));
  for (Eigen::Index i = 0; i < v.dims(); ++i) f[static_cast<std::size_t>(i)] = static_cast<float>(v.direction[i]);
  nlohmann::ordered_json j;
  j["feature"] = v.feature;
  j["class"] = std::string(to_string(v.phone_class));
  j["F"] = v.dims();
  j["n_pos"] = v.n_pos;
  j["n_neg"] = v.n_neg;
  j["bank"] = v.bank_id;
  j["direction_f32_b64"] =
      base64_encode(reinterpret_cast<const std::uint8_t*>(f.data()), f.size() * sizeof(float));
  return j;
}

PhonologicalVector vector_from_json(const nlohmann::json& j) {
  try {
    PhonologicalVector v;
    v.feature = j.at("feature").get<std::string>();
    v.phone_class = parse_phone_class(j.at("class").get<std::string>());
    v.n_pos = j.at("n_pos").get<std::size_t>();
    v.n_neg = j.at("n_neg").get<std::size_t>();
    v.bank_id = j.value("bank", std::string{});
    const auto dims = j.at("F").get<Eigen::Index>();
    const auto bytes = base64_decode(j.at("direction_f32_b64").get<std::string>());
    if (static_cast<Eigen::Index>(bytes.size()) != dims * static_cast<Eigen::Index>(sizeof(float))) {
      throw Error(Errc::LengthMismatch, "vector payload does not match F");
    }
    v.direction.resize(dims);
    for (Eigen::Index i = 0; i < dims; ++i) {
      float x;
      std::memcpy(&x, bytes.data() + i * static_cast<Eigen::Index>(sizeof(float)), sizeof x);
      v.direction[i] = x;
    }
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, std::string("bad vector JSON: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const EditSpec& e) {
  nlohmann::ordered_json j;
  j["edit_id"] = e.edit_id;
  j["utterance_id"] = e.utterance_id;
  j["phone"] = e.phone;
  j["t_start"] = e.t_start;
  j["t_end"] = e.t_end;
  j["frame_start"] = e.frames.begin;
  j["frame_end"] = e.frames.end;
  j["feature"] = e.feature;
  j["class"] = std::string(to_string(e.phone_class));
  j["lambda"] = e.lambda;
  return j;
}

EditSpec edit_from_json(const nlohmann::json& j) {
  try {
    EditSpec e;
    e.edit_id = j.at("edit_id").get<std::string>();
    e.utterance_id = j.at("utterance_id").get<std::string>();
    e.phone = j.value("phone", std::string{});
    e.t_start = j.at("t_start").get<double>();
    e.t_end = j.at("t_end").get<double>();
    e.frames = {j.value("frame_start", Eigen::Index{0}), j.value("frame_end", Eigen::Index{1})};
    e.feature = canonical_feature_name(j.at("feature").get<std::string>());
    e.phone_class = parse_phone_class(j.value("class", std::string("consonant")));
    e.lambda = j.at("lambda").get<double>();
    if (!(e.t_end > e.t_start)) throw Error(Errc::Parse, "edit segment needs t_start < t_end");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::Parse, std::string("bad edit record: ") + ex.what());
  }
}

std::vector<EditSpec> read_edit_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open edit log " + path.string());
  std::vector<EditSpec> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(edit_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::Parse, path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace phonovec
