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

#ifndef ASSOSM_KV_FILE_HPP_
#define ASSOSM_KV_FILE_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace assosm {

/// Flat "key = value" text with optional [section] headers. Keys inside a
/// section are addressed as "section.key". '#' starts a comment.
class KvFile {
 public:
  static KvFile parse(const std::string& text, const std::string& origin = "<string>");
  static KvFile load(const std::filesystem::path& file);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  Eigen::VectorXd get_vector(const std::string& key) const;

  /// Insertion-ordered writes; set() on an existing key replaces the value.
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, const Eigen::MatrixXd& values);

  std::string to_string() const;
  void save(const std::filesystem::path& file) const;

  const std::vector<std::string>& keys() const noexcept { return order_; }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
  std::string origin_;
};

/// Shortest round-trip decimal text (17 significant digits).
std::string format_double(double value);

}  // namespace assosm

#endif  // ASSOSM_KV_FILE_HPP_
