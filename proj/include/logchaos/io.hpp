#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "logchaos/errors.hpp"

namespace logchaos::io {

namespace fs = std::filesystem;

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
inline void write_atomic(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

/// Shortest text that round-trips the double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt(std::size_t v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(const std::string& v) { return v; }
inline std::string fmt(const char* v) { return v; }

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  template <typename... T>
  void add(const T&... cells) {
    if (sizeof...(cells) != header_.size()) throw std::logic_error("csv: row width differs from header");
    rows_.push_back({fmt(cells)...});
  }

  std::size_t rows() const { return rows_.size(); }

  std::string str() const {
    std::string s;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
      }
      s += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return s;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Ordered `key = value` text file.  Keys may repeat (events).
class Manifest {
 public:
  template <typename T>
  void set(const std::string& key, const T& value) {
    entries_.emplace_back(key, fmt(value));
  }

  void section(const std::string& name) { entries_.emplace_back("[" + name + "]", std::string{}); }

  std::string str() const {
    std::string s;
    for (const auto& [k, v] : entries_) {
      if (!k.empty() && k.front() == '[') {
        s += (s.empty() ? "" : "\n") + k + "\n";
        continue;
      }
      std::string flat = v;
      for (char& c : flat)
        if (c == '\n') c = ' ';
      s += k + " = " + flat + "\n";
    }
    return s;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Flat little-endian float64 array.
inline std::string dump_bytes(std::span<const double> values) {
  std::string bytes(values.size() * sizeof(double), '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t u;
    std::memcpy(&u, &values[i], sizeof u);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    std::memcpy(bytes.data() + i * sizeof u, &u, sizeof u);
  }
  return bytes;
}

inline std::vector<double> read_dump(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dump " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  if (bytes.size() % sizeof(double)) throw ConfigError("dump size is not a multiple of 8 bytes: " + path.string());
  std::vector<double> out(bytes.size() / sizeof(double));
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t u;
    std::memcpy(&u, bytes.data() + i * sizeof u, sizeof u);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    std::memcpy(&out[i], &u, sizeof u);
  }
  return out;
}

}  // namespace logchaos::io
