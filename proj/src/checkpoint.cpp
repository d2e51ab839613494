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

#include "ipitch/checkpoint.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ipitch/csv.hpp"
#include "ipitch/error.hpp"

namespace ipitch {

const NamedArray& ModelCheckpoint::layer(std::string_view name) const {
  for (const auto& l : layers)
    if (l.name == name) return l;
  fail(ErrorKind::ArchitectureMismatch, "checkpoint has no array named '" + std::string(name) + "'");
}

NamedArray to_named_array(const std::string& name, const Eigen::MatrixXd& m) {
  NamedArray a;
  a.name = name;
  a.shape = {m.rows(), m.cols()};
  a.values.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.values.push_back(m(i, j));
  return a;
}

Eigen::MatrixXd to_matrix(const NamedArray& a, Eigen::Index rows, Eigen::Index cols) {
  if (a.shape.size() != 2 || a.shape[0] != rows || a.shape[1] != cols ||
      a.values.size() != static_cast<std::size_t>(rows * cols))
    fail(ErrorKind::ArchitectureMismatch, "array '" + a.name + "' does not have shape " + std::to_string(rows) +
                                              "x" + std::to_string(cols));
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = a.values[k++];
  return m;
}

namespace {

// Weights are always finite; NaN losses (e.g. no validation set) become null.
std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

std::string serialize(const ModelCheckpoint& ckpt) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"format_version\": " << ckpt.format_version << ",\n";
  os << "  \"model_kind\": " << json_string(ckpt.model_kind) << ",\n";
  os << "  \"architecture\": {";
  bool first = true;
  for (const auto& [key, value] : ckpt.architecture) {
    os << (first ? "" : ", ") << json_string(key) << ": " << value;
    first = false;
  }
  os << "},\n";
  os << "  \"train_meta\": {\"seed\": " << ckpt.train_meta.seed << ", \"epochs\": " << ckpt.train_meta.epochs
     << ", \"final_train_loss\": " << json_number(ckpt.train_meta.final_train_loss)
     << ", \"final_val_loss\": " << json_number(ckpt.train_meta.final_val_loss) << "},\n";
  os << "  \"layers\": [";
  for (std::size_t l = 0; l < ckpt.layers.size(); ++l) {
    const NamedArray& a = ckpt.layers[l];
    os << (l ? ",\n" : "\n") << "    {\"name\": " << json_string(a.name) << ", \"shape\": [";
    for (std::size_t d = 0; d < a.shape.size(); ++d) os << (d ? ", " : "") << a.shape[d];
    os << "], \"values\": [";
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (!std::isfinite(a.values[i]))
        fail(ErrorKind::NonFiniteLoss, "array '" + a.name + "' holds a non-finite value");
      os << (i ? ", " : "") << format_double(a.values[i]);
    }
    os << "]}";
  }
  os << "\n  ]\n}\n";
  return os.str();
}

ModelCheckpoint parse_checkpoint(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseFailure, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  ModelCheckpoint ckpt;
  try {
    ckpt.format_version = j.at("format_version").get<int>();
    ckpt.model_kind = j.at("model_kind").get<std::string>();
    for (const auto& [key, value] : j.at("architecture").items()) ckpt.architecture[key] = value.get<long>();
    const auto& meta = j.at("train_meta");
    ckpt.train_meta.seed = meta.at("seed").get<std::uint64_t>();
    ckpt.train_meta.epochs = meta.at("epochs").get<int>();
    const auto loss = [](const nlohmann::json& v) {
      return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    ckpt.train_meta.final_train_loss = loss(meta.at("final_train_loss"));
    ckpt.train_meta.final_val_loss = loss(meta.at("final_val_loss"));
    for (const auto& l : j.at("layers")) {
      NamedArray a;
      a.name = l.at("name").get<std::string>();
      a.shape = l.at("shape").get<std::vector<Eigen::Index>>();
      a.values = l.at("values").get<std::vector<double>>();
      ckpt.layers.push_back(std::move(a));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseFailure, std::string("checkpoint is missing fields: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& ckpt) {
  write_text_file(path, serialize(ckpt));
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorKind::MissingInput, "missing checkpoint " + path.string());
  return parse_checkpoint(read_text_file(path));
}

}  // namespace ipitch
