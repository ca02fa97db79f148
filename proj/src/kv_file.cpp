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

#include "assosm/kv_file.hpp"

#include "assosm/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace assosm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError(what + ": '" + text + "' is not a number");
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

KvFile KvFile::parse(const std::string& text, const std::string& origin) {
  KvFile kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (!section.empty()) key = section + "." + key;
    kv.set(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

KvFile KvFile::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), file.string());
}

const std::string& KvFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin_ + ": missing key '" + key + "'");
  return it->second;
}

std::optional<std::string> KvFile::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double KvFile::get_double(const std::string& key) const {
  return parse_double(get(key), origin_ + ": " + key);
}

double KvFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KvFile::get_int(const std::string& key) const {
  const std::string t = trim(get(key));
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError(origin_ + ": " + key + ": '" + t + "' is not an integer");
  }
  return v;
}

std::int64_t KvFile::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KvFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string t = trim(get(key));
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t.front() == '-' || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError(origin_ + ": " + key + ": '" + t + "' is not an unsigned integer");
  }
  return v;
}

std::vector<double> KvFile::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_double(item, origin_ + ": " + key));
  }
  return out;
}

Eigen::VectorXd KvFile::get_vector(const std::string& key) const {
  const auto list = get_list(key);
  return Eigen::Map<const Eigen::VectorXd>(list.data(), static_cast<Eigen::Index>(list.size()));
}

void KvFile::set(const std::string& key, const std::string& value) {
  if (values_.count(key) == 0) order_.push_back(key);
  values_[key] = value;
}

void KvFile::set(const std::string& key, double value) { set(key, format_double(value)); }

void KvFile::set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }

void KvFile::set(const std::string& key, const Eigen::MatrixXd& values) {
  std::string text;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (!text.empty()) text += ", ";
      text += format_double(values(i, j));
    }
  }
  set(key, text);
}

std::string KvFile::to_string() const {
  // Unsectioned keys first, then one block per section in first-seen order.
  std::ostringstream out;
  std::vector<std::string> sections;
  for (const auto& key : order_) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      out << key << " = " << values_.at(key) << '\n';
    } else {
      const std::string sec = key.substr(0, dot);
      bool seen = false;
      for (const auto& s : sections) seen = seen || s == sec;
      if (!seen) sections.push_back(sec);
    }
  }
  for (const auto& sec : sections) {
    out << "\n[" << sec << "]\n";
    for (const auto& key : order_) {
      const auto dot = key.find('.');
      if (dot != std::string::npos && key.substr(0, dot) == sec) {
        out << key.substr(dot + 1) << " = " << values_.at(key) << '\n';
      }
    }
  }
  return out.str();
}

void KvFile::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << to_string();
}

}  // namespace assosm
