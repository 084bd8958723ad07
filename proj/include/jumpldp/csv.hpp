#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumpldp/errors.hpp"
#include "jumpldp/version.hpp"

namespace jumpldp::io {

/// 17 significant digits: enough to round-trip any double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

/// Deterministic CSV accumulator; rows are emitted in call order and the byte
/// stream depends only on the supplied values.
class CsvWriter {
 public:
  CsvWriter& raw(const std::string& field) {
    if (!at_row_start_) buf_ += ',';
    buf_ += field;
    at_row_start_ = false;
    return *this;
  }
  CsvWriter& num(double v) { return raw(format_double(v)); }
  CsvWriter& integer(std::int64_t v) { return raw(std::to_string(v)); }
  void end_row() {
    buf_ += '\n';
    at_row_start_ = true;
  }
  const std::string& bytes() const { return buf_; }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << buf_;
    if (!out) throw IoError("failed writing " + path);
  }

 private:
  std::string buf_;
  bool at_row_start_ = true;
};

struct ManifestInput {
  std::string path;
  std::string digest;
};

/// Every CSV output is accompanied by a manifest recording the command, input
/// digests, master seed and tool version. Wall clock is informational; the
/// CSV itself is the byte-reproducible artifact.
struct RunManifest {
  std::string command;
  std::vector<ManifestInput> inputs;
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  double wall_clock_ms = 0.0;

  void write(const std::string& path) const {
    nlohmann::json doc;
    doc["command"] = command;
    doc["version"] = kVersion;
    auto ins = nlohmann::json::array();
    for (const auto& in : inputs) ins.push_back({{"path", in.path}, {"digest", in.digest}});
    doc["inputs"] = ins;
    if (has_seed) doc["seed"] = seed;
    else doc["seed"] = nullptr;
    doc["outputs"] = outputs;
    doc["wall_clock_ms"] = wall_clock_ms;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << doc.dump(2) << "\n";
  }
};

class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace jumpldp::io
