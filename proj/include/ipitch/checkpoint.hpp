// Copyright 2026 The ipitch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace ipitch {

struct TrainMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double final_train_loss = 0.0;
  double final_val_loss = 0.0;
};

struct NamedArray {
  std::string name;
  std::vector<Eigen::Index> shape;
  std::vector<double> values;  // row-major
};

struct ModelCheckpoint {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  std::string model_kind;
  std::map<std::string, long> architecture;
  std::vector<NamedArray> layers;
  TrainMeta train_meta;

  const NamedArray& layer(std::string_view name) const;
};

NamedArray to_named_array(const std::string& name, const Eigen::MatrixXd& m);
// Throws ArchitectureMismatch when the stored shape differs.
Eigen::MatrixXd to_matrix(const NamedArray& a, Eigen::Index rows, Eigen::Index cols);

// JSON text with every number written at 17 significant digits.
std::string serialize(const ModelCheckpoint& ckpt);
ModelCheckpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& ckpt);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ipitch
