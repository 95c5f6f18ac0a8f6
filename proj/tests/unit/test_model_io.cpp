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

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "treeagg/datasets.hpp"
#include "treeagg/model_io.hpp"

namespace treeagg {
namespace {

Forest trained(Task task, Multiclass mc = Multiclass::kHeuristic,
               std::size_t k = 2) {
  std::mt19937_64 gen(3);
  RawMatrix X;
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> a(300), b(300), y(300);
  std::vector<std::string> c(300);
  for (std::size_t i = 0; i < 300; ++i) {
    a[i] = i % 23 == 0 ? NAN : z(gen);
    b[i] = z(gen);
    c[i] = i % 19 == 0 ? "" : std::string(1, static_cast<char>('a' + gen() % 5));
    y[i] = task == Task::kRegression
               ? b[i] + (c[i] == "a")
               : static_cast<double>((b[i] > 0) + (k > 2 && b[i] > 1));
  }
  X.columns.push_back(RawColumn::continuous("a", a));
  X.columns.push_back(RawColumn::continuous("b b", b));
  X.columns.push_back(RawColumn::categories("c", c));
  TrainConfig config;
  config.task = task;
  config.n_trees = 4;
  config.multiclass = mc;
  config.max_depth = 6;
  config.seed = 12;
  std::vector<std::string> names;
  if (task == Task::kClassification) {
    for (std::size_t i = 0; i < k; ++i) names.push_back("class " + std::to_string(i));
  }
  return fit(X, y, config, names);
}

RawMatrix probe_rows(std::size_t n) {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> z(0.0, 2.0);
  RawMatrix X;
  std::vector<double> a(n), b(n);
  std::vector<std::string> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = i % 7 == 0 ? NAN : z(gen);
    b[i] = z(gen);
    c[i] = i % 11 == 0 ? "unseen" : std::string(1, static_cast<char>('a' + gen() % 5));
  }
  X.columns.push_back(RawColumn::continuous("a", a));
  X.columns.push_back(RawColumn::continuous("b b", b));
  X.columns.push_back(RawColumn::categories("c", c));
  return X;
}

TEST(ModelIo, RoundTripPreservesPredictionsBitExactly) {
  const auto X = probe_rows(100);
  for (auto forest : {trained(Task::kClassification),
                      trained(Task::kClassification, Multiclass::kOneVsRest, 3),
                      trained(Task::kClassification, Multiclass::kHeuristic, 3),
                      trained(Task::kRegression)}) {
    const auto bytes = serialize_model(forest);
    const auto back = deserialize_model(bytes);
    EXPECT_EQ(back, forest);
    EXPECT_EQ(serialize_model(back), bytes);
    for (auto mode : {PredictMode::kDefault, PredictMode::kLeafOnly}) {
      const auto p = predict_raw_output(forest, bin(forest, X), mode);
      const auto q = predict_raw_output(back, bin(back, X), mode);
      ASSERT_EQ(p.size(), q.size());
      EXPECT_EQ(0, std::memcmp(p.data(), q.data(), p.size() * sizeof(double)));
    }
  }
}

TEST(ModelIo, SaveAndLoadFile) {
  const auto path = (std::filesystem::temp_directory_path() /
                     "treeagg_model_io_test.bin")
                        .string();
  auto forest = trained(Task::kClassification);
  save_model(forest, path);
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  EXPECT_EQ(load_model(path), forest);
  std::filesystem::remove(path);
  EXPECT_THROW(load_model(path), IoError);
  EXPECT_THROW(save_model(forest, ""), IoError);
  EXPECT_THROW(load_model(""), IoError);
}

TEST(ModelIo, CorruptionIsDetected) {
  const auto bytes = serialize_model(trained(Task::kRegression));
  // Any flipped payload byte trips the checksum.
  for (std::size_t pos : {std::size_t{20}, bytes.size() / 2, bytes.size() - 5}) {
    auto bad = bytes;
    bad[pos] = static_cast<char>(bad[pos] ^ 0x5a);
    try {
      deserialize_model(bad);
      FAIL() << "corruption at " << pos << " not detected";
    } catch (const FormatError& e) {
      EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos);
    }
  }
  auto checksum = bytes;
  checksum.back() = static_cast<char>(checksum.back() ^ 1);
  EXPECT_THROW(deserialize_model(checksum), FormatError);
}

TEST(ModelIo, VersionMagicAndTruncation) {
  const auto bytes = serialize_model(trained(Task::kClassification));
  auto version = bytes;
  version[8] = 2;
  try {
    deserialize_model(version);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(deserialize_model(magic), FormatError);
  for (std::size_t n : {std::size_t{0}, std::size_t{5}, std::size_t{13},
                        bytes.size() / 2, bytes.size() - 1}) {
    try {
      deserialize_model(std::string_view(bytes).substr(0, n));
      FAIL() << "truncation to " << n << " not detected";
    } catch (const FormatError&) {
    }
  }
  EXPECT_THROW(deserialize_model(bytes + "x"), FormatError);
}

TEST(ModelIo, FileDoesNotDependOnWorkerCount) {
  auto a = trained(Task::kClassification);
  auto b = a;
  b.config.n_workers = 7;
  EXPECT_EQ(serialize_model(a), serialize_model(b));
}

}  // namespace
}  // namespace treeagg
