/*
 * Copyright 2026 The treeagg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TREEAGG_MODEL_IO_HPP_
#define TREEAGG_MODEL_IO_HPP_

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "treeagg/error.hpp"
#include "treeagg/file_io.hpp"
#include "treeagg/forest.hpp"

namespace treeagg {

// Layout is documented in docs/model_format.md.
inline constexpr char kModelMagic[8] = {'T', 'R', 'E', 'E', 'A', 'G', 'G', '\0'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void boolean(bool v) { u8(v ? 1 : 0); }
  void str(std::string_view s) {
    u64(s.size());
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }

  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{u8()} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{u8()} << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  bool boolean() {
    const auto v = u8();
    if (v > 1) throw FormatError("corrupt model: bad boolean");
    return v == 1;
  }
  std::string str() {
    const auto n = u64();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  // Element counts are checked against the remaining bytes before any
  // allocation.
  std::size_t count(std::size_t min_bytes_each) {
    const auto n = u64();
    if (min_bytes_each > 0 && n > remaining() / min_bytes_each) {
      throw FormatError("corrupt model: count exceeds file size");
    }
    return static_cast<std::size_t>(n);
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > remaining()) throw FormatError("model file is truncated");
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

template <typename E>
E read_enum(ByteReader& r, std::uint8_t max) {
  const auto v = r.u8();
  if (v > max) throw FormatError("corrupt model: enum value out of range");
  return static_cast<E>(v);
}

inline void write_config(ByteWriter& w, const TrainConfig& c) {
  w.u64(c.n_trees);
  w.u8(static_cast<std::uint8_t>(c.task));
  w.u64(c.max_bins);
  w.u64(c.max_features);
  w.f64(c.min_samples_leaf);
  w.f64(c.min_samples_split);
  w.f64(c.min_impurity);
  w.boolean(c.max_depth.has_value());
  w.u32(c.max_depth.value_or(0));
  w.boolean(c.eta.has_value());
  w.f64(c.eta.value_or(0.0));
  w.f64(c.alpha);
  w.boolean(c.criterion.has_value());
  w.u8(static_cast<std::uint8_t>(c.resolved_criterion()));
  w.boolean(c.aggregation);
  w.u8(static_cast<std::uint8_t>(c.multiclass));
  w.u64(c.seed);
}

inline TrainConfig read_config(ByteReader& r) {
  TrainConfig c;
  c.n_trees = r.u64();
  c.task = read_enum<Task>(r, 1);
  c.max_bins = r.u64();
  c.max_features = r.u64();
  c.min_samples_leaf = r.f64();
  c.min_samples_split = r.f64();
  c.min_impurity = r.f64();
  const bool has_depth = r.boolean();
  const auto depth = r.u32();
  if (has_depth) c.max_depth = depth;
  const bool has_eta = r.boolean();
  const auto eta = r.f64();
  if (has_eta) c.eta = eta;
  c.alpha = r.f64();
  const bool has_criterion = r.boolean();
  const auto criterion = read_enum<Criterion>(r, 2);
  if (has_criterion) c.criterion = criterion;
  c.aggregation = r.boolean();
  c.multiclass = read_enum<Multiclass>(r, 1);
  c.seed = r.u64();
  return c;
}

inline void write_mapper(ByteWriter& w, const BinMapper& m) {
  w.u64(m.n_features());
  for (std::size_t f = 0; f < m.n_features(); ++f) {
    const auto& b = m.features[f];
    w.str(m.names[f]);
    w.u8(static_cast<std::uint8_t>(b.kind));
    w.u32(b.n_bins);
    w.boolean(b.has_missing);
    w.u32(b.missing_bin);
    w.boolean(b.overflow_bin.has_value());
    w.u32(b.overflow_bin.value_or(0));
    w.u64(b.thresholds.size());
    for (double t : b.thresholds) w.f64(t);
    w.u64(b.categories.size());
    for (const auto& c : b.categories) w.str(c);
  }
}

inline BinMapper read_mapper(ByteReader& r) {
  BinMapper m;
  const auto d = r.count(1);
  for (std::size_t f = 0; f < d; ++f) {
    m.names.push_back(r.str());
    FeatureBins b;
    b.kind = read_enum<FeatureKind>(r, 1);
    b.n_bins = r.u32();
    b.has_missing = r.boolean();
    b.missing_bin = r.u32();
    const bool has_overflow = r.boolean();
    const auto overflow = r.u32();
    if (has_overflow) b.overflow_bin = overflow;
    const auto nt = r.count(8);
    b.thresholds.resize(nt);
    for (auto& t : b.thresholds) t = r.f64();
    const auto nc = r.count(8);
    b.categories.reserve(nc);
    for (std::size_t k = 0; k < nc; ++k) b.categories.push_back(r.str());
    if (b.n_bins < 1 || b.n_bins > kMaxBins ||
        (b.has_missing && b.missing_bin >= b.n_bins) ||
        (b.overflow_bin && *b.overflow_bin >= b.n_bins) ||
        (b.kind == FeatureKind::kContinuous &&
         b.thresholds.size() + 1 > b.n_value_bins())) {
      throw FormatError("corrupt model: inconsistent bins for feature '" +
                        m.names.back() + "'");
    }
    b.rebuild_index();
    m.features.push_back(std::move(b));
  }
  return m;
}

inline void write_split(ByteWriter& w, const Split& s) {
  w.u32(s.feature);
  w.u8(static_cast<std::uint8_t>(s.kind));
  w.u32(s.threshold);
  w.boolean(s.missing_left);
  for (std::size_t byte = 0; byte < kMaxBins / 8; ++byte) {
    std::uint8_t v = 0;
    for (std::size_t bit = 0; bit < 8; ++bit) {
      if (s.left_bins[byte * 8 + bit]) v |= std::uint8_t(1u << bit);
    }
    w.u8(v);
  }
}

inline Split read_split(ByteReader& r) {
  Split s;
  s.feature = r.u32();
  s.kind = read_enum<FeatureKind>(r, 1);
  s.threshold = r.u32();
  s.missing_left = r.boolean();
  for (std::size_t byte = 0; byte < kMaxBins / 8; ++byte) {
    const auto v = r.u8();
    for (std::size_t bit = 0; bit < 8; ++bit) {
      s.left_bins[byte * 8 + bit] = (v >> bit) & 1u;
    }
  }
  return s;
}

inline void write_tree(ByteWriter& w, const Tree& t) {
  w.f64(t.eta);
  w.f64(t.alpha);
  w.u64(t.size());
  for (std::size_t v = 0; v < t.size(); ++v) {
    const auto& n = t.node(v);
    w.u32(n.parent);
    w.u32(n.left);
    w.u32(n.right);
    w.u32(n.depth);
    write_split(w, n.split);
    w.u32(n.n_itb);
    w.f64(n.itb_weight);
    w.u32(n.n_oob);
    w.f64(n.loss);
    w.f64(n.log_wbar);
    for (double s : t.stats(v)) w.f64(s);
  }
}

inline Tree read_tree(ByteReader& r, const LabelSpec& labels,
                      std::size_t n_features) {
  Tree t(labels);
  t.eta = r.f64();
  t.alpha = r.f64();
  const auto n = r.count(64);
  if (n == 0) throw FormatError("corrupt model: empty tree");
  std::vector<Node> nodes(n);
  std::vector<double> stats;
  stats.reserve(n * labels.width());
  for (auto& node : nodes) {
    node.parent = r.u32();
    node.left = r.u32();
    node.right = r.u32();
    node.depth = r.u32();
    node.split = read_split(r);
    node.n_itb = r.u32();
    node.itb_weight = r.f64();
    node.n_oob = r.u32();
    node.loss = r.f64();
    node.log_wbar = r.f64();
    for (std::size_t k = 0; k < labels.width(); ++k) stats.push_back(r.f64());
    if (!node.is_leaf() && node.split.feature >= n_features) {
      throw FormatError("corrupt model: split on unknown feature");
    }
  }
  try {
    t.restore(std::move(nodes), std::move(stats));
  } catch (const InternalError& e) {
    throw FormatError(std::string("corrupt model: ") + e.what());
  }
  return t;
}

}  // namespace detail

// The payload omits n_workers.
inline std::string serialize_model(const Forest& forest) {
  detail::ByteWriter payload;
  detail::write_config(payload, forest.config);
  payload.u8(static_cast<std::uint8_t>(forest.labels.task));
  payload.u64(forest.labels.n_classes);
  payload.f64(forest.eta);
  payload.f64(forest.y_min);
  payload.f64(forest.y_max);
  payload.u64(forest.class_names.size());
  for (const auto& c : forest.class_names) payload.str(c);
  detail::write_mapper(payload, forest.mapper);
  payload.u64(forest.trees.size());
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    payload.u32(forest.tree_class[t]);
    detail::write_tree(payload, forest.trees[t]);
  }

  const auto& body = payload.bytes();
  detail::ByteWriter file;
  file.raw(std::string_view(kModelMagic, sizeof kModelMagic));
  file.u32(kModelVersion);
  file.u64(body.size());
  file.raw(body);
  file.u32(static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
            static_cast<uInt>(body.size()))));
  return std::move(file.bytes());
}

inline Forest deserialize_model(std::string_view bytes) {
  detail::ByteReader head(bytes);
  if (bytes.size() < sizeof kModelMagic ||
      std::memcmp(bytes.data(), kModelMagic, sizeof kModelMagic) != 0) {
    throw FormatError("not a treeagg model file");
  }
  head = detail::ByteReader(bytes.substr(sizeof kModelMagic));
  const auto version = head.u32();
  if (version != kModelVersion) {
    throw FormatError("unsupported model version " + std::to_string(version) +
                      " (expected " + std::to_string(kModelVersion) + ")");
  }
  const auto size = head.u64();
  const std::size_t offset = sizeof kModelMagic + 4 + 8;
  if (size > bytes.size() - offset || bytes.size() - offset - size < 4) {
    throw FormatError("model file is truncated");
  }
  if (bytes.size() - offset - size > 4) {
    throw FormatError("model file has trailing bytes");
  }
  const auto body = bytes.substr(offset, size);
  detail::ByteReader tail(bytes.substr(offset + size));
  const auto stored = tail.u32();
  const auto actual = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
            static_cast<uInt>(body.size())));
  if (stored != actual) throw FormatError("model checksum mismatch");

  detail::ByteReader r(body);
  Forest f;
  f.config = detail::read_config(r);
  f.labels.task = detail::read_enum<Task>(r, 1);
  f.labels.n_classes = r.u64();
  f.eta = r.f64();
  f.y_min = r.f64();
  f.y_max = r.f64();
  const auto nc = r.count(8);
  for (std::size_t k = 0; k < nc; ++k) f.class_names.push_back(r.str());
  f.mapper = detail::read_mapper(r);
  const auto nt = r.count(4);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto cls = r.u32();
    f.tree_class.push_back(cls);
    const LabelSpec tree_labels =
        f.one_vs_rest() ? LabelSpec{Task::kClassification, 2} : f.labels;
    if (cls >= f.labels.output_width()) {
      throw FormatError("corrupt model: tree class out of range");
    }
    f.trees.push_back(detail::read_tree(r, tree_labels, f.mapper.n_features()));
  }
  if (r.remaining() != 0) throw FormatError("corrupt model: trailing payload");
  const std::size_t groups = f.one_vs_rest() ? f.labels.n_classes : 1;
  if (nt == 0 || nt != groups * f.config.n_trees) {
    throw FormatError("corrupt model: unexpected tree count");
  }
  if (f.labels.task == Task::kClassification && f.labels.n_classes < 2) {
    throw FormatError("corrupt model: fewer than two classes");
  }
  return f;
}

inline void save_model(const Forest& forest, const std::string& path) {
  write_file_atomic(path, serialize_model(forest));
}

inline Forest load_model(const std::string& path) {
  const auto bytes = read_file(path);
  return deserialize_model(std::string_view(
      reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace treeagg

#endif  // TREEAGG_MODEL_IO_HPP_
