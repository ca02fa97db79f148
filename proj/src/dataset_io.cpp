// Copyright 2026 The assosm Authors
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

#include "assosm/data.hpp"
#include "assosm/errors.hpp"
#include "assosm/kv_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace assosm {

namespace fs = std::filesystem;

void write_matrix_csv(const fs::path& file, const Eigen::MatrixXd& m) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    out << (j ? "," : "") << "s" << j;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "") << format_double(m(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(file.string() + ": missing header row");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ConfigError(file.string() + ": bad number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError(file.string() + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void write_dataset(const fs::path& dir, const DataSet& data, const DataManifest& manifest) {
  fs::create_directories(dir);
  const DesignData& v = data.design_view();
  write_matrix_csv(dir / "I.csv", v.inputs);
  write_matrix_csv(dir / "O1.csv", v.upper);
  write_matrix_csv(dir / "O2.csv", v.last);
  write_matrix_csv(dir / "O1plus.csv", v.upper_rates);
  if (v.last_rates) write_matrix_csv(dir / "O2plus.csv", *v.last_rates);
  // Simulator-side records, kept apart from the design inputs.
  fs::create_directories(dir / "oracle");
  write_matrix_csv(dir / "oracle" / "D.csv", data.disturbance_samples());
  write_matrix_csv(dir / "oracle" / "Psi.csv", data.realized_noise());

  KvFile kv;
  kv.set("t0", manifest.t0);
  kv.set("tau", manifest.tau);
  kv.set("T", static_cast<std::int64_t>(manifest.samples));
  kv.set("seed", std::to_string(manifest.seed));
  kv.set("derivative_mode", to_string(manifest.mode));
  kv.set("psi_bar", manifest.bound.psi_bar);
  kv.set("gamma_gram", manifest.bound.gamma_gram);
  if (manifest.benchmark) kv.set("benchmark", *manifest.benchmark);
  kv.save(dir / "manifest.txt");
}

DataManifest read_manifest(const fs::path& dir) {
  const KvFile kv = KvFile::load(dir / "manifest.txt");
  DataManifest m;
  m.t0 = kv.get_double("t0");
  m.tau = kv.get_double("tau");
  m.samples = static_cast<int>(kv.get_int("T"));
  m.seed = kv.get_u64("seed", 0);
  m.mode = parse_derivative_mode(kv.get("derivative_mode"));
  m.bound.psi_bar = kv.get_double("psi_bar");
  const auto gram = kv.get_list("gamma_gram");
  const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(gram.size()))));
  if (side * side != static_cast<Eigen::Index>(gram.size())) {
    throw ConfigError("manifest: gamma_gram is not square");
  }
  m.bound.gamma_gram = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                      Eigen::RowMajor>>(gram.data(), side, side);
  if (auto b = kv.find("benchmark")) m.benchmark = *b;
  return m;
}

DesignData read_design_data(const fs::path& dir) {
  DesignData d;
  d.inputs = read_matrix_csv(dir / "I.csv");
  d.upper = read_matrix_csv(dir / "O1.csv");
  d.last = read_matrix_csv(dir / "O2.csv");
  d.upper_rates = read_matrix_csv(dir / "O1plus.csv");
  if (fs::exists(dir / "O2plus.csv")) d.last_rates = read_matrix_csv(dir / "O2plus.csv");
  d.check_shapes();
  return d;
}

std::optional<Eigen::MatrixXd> read_realized_noise(const fs::path& dir) {
  const fs::path file = dir / "oracle" / "Psi.csv";
  if (!fs::exists(file)) return std::nullopt;
  return read_matrix_csv(file);
}

}  // namespace assosm
