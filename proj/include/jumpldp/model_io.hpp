#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "jumpldp/errors.hpp"
#include "jumpldp/laplace.hpp"
#include "jumpldp/process_model.hpp"

namespace jumpldp::io {

using nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// FNV-1a 64-bit content digest, hex encoded.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return std::string(out);
}

inline std::string file_digest(const std::string& path) { return digest(read_file(path)); }

namespace detail {

inline json parse(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return doc;
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& path) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known) throw IoError(path + ": unknown field '" + item.key() + "'");
  }
}

inline Vec to_vec(const json& arr, const std::string& what) {
  if (!arr.is_array()) throw IoError(what + " must be an array of reals");
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw IoError(what + " must be an array of reals");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

}  // namespace detail

/// Model file: { "labels": [...], "q": [...], "alpha": [[...], ...] }.
/// Unknown fields are rejected; validation tolerances follow validate_spec.
inline ProcessSpec load_model(const std::string& path, double tol = kDefaultTol) {
  const json doc = detail::parse(path);
  if (!doc.is_object()) throw IoError(path + ": model must be an object");
  detail::reject_unknown(doc, {"labels", "q", "alpha"}, path);
  if (!doc.contains("labels") || !doc.contains("q") || !doc.contains("alpha"))
    throw IoError(path + ": model needs fields labels, q, alpha");

  std::vector<std::string> labels;
  for (const auto& l : doc["labels"]) {
    if (!l.is_string()) throw IoError(path + ": labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  const Vec q = detail::to_vec(doc["q"], path + ": q");
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (q.size() != n) throw IoError(path + ": q length does not match labels");
  if (!doc["alpha"].is_array() || static_cast<Eigen::Index>(doc["alpha"].size()) != n)
    throw IoError(path + ": alpha must be n rows");
  Mat alpha(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    const Vec row = detail::to_vec(doc["alpha"][static_cast<std::size_t>(x)], path + ": alpha row");
    if (row.size() != n) throw IoError(path + ": alpha row has wrong length");
    alpha.row(x) = row;
  }
  return validate_spec(std::move(labels), q, alpha, tol);
}

/// Target-measure file: a bare array of n weights.
inline ProbMeasure load_target(const std::string& path, const ProcessSpec& spec) {
  const json doc = detail::parse(path);
  const Vec w = detail::to_vec(doc, path + ": target");
  if (w.size() != spec.q.size()) throw IoError(path + ": target length does not match model");
  return attach_density(spec, make_measure(w));
}

/// Functional / event descriptor: a bare array (linear functional f), an
/// object {"f": [...], "c": real} (half space <f, eta> >= c), or an object
/// {"target": [...], "radius": real} (total-variation ball).
using Descriptor = std::variant<LinearFunctional, HalfSpaceEvent, TvBallEvent>;

inline Descriptor load_descriptor(const std::string& path, const ProcessSpec& spec) {
  const json doc = detail::parse(path);
  if (doc.is_array()) {
    Vec f = detail::to_vec(doc, path + ": f");
    if (f.size() != spec.q.size()) throw IoError(path + ": f length does not match model");
    return LinearFunctional{std::move(f)};
  }
  if (!doc.is_object()) throw IoError(path + ": descriptor must be an array or object");
  if (doc.contains("f")) {
    detail::reject_unknown(doc, {"f", "c"}, path);
    if (!doc.contains("c")) throw IoError(path + ": half-space descriptor needs c");
    Vec f = detail::to_vec(doc["f"], path + ": f");
    if (f.size() != spec.q.size()) throw IoError(path + ": f length does not match model");
    return HalfSpaceEvent{std::move(f), doc["c"].get<double>()};
  }
  if (doc.contains("target")) {
    detail::reject_unknown(doc, {"target", "radius"}, path);
    if (!doc.contains("radius")) throw IoError(path + ": ball descriptor needs radius");
    Vec target = detail::to_vec(doc["target"], path + ": target");
    if (target.size() != spec.q.size()) throw IoError(path + ": target length does not match model");
    const double radius = doc["radius"].get<double>();
    if (radius < 0.0) throw IoError(path + ": radius must be nonnegative");
    return TvBallEvent{make_measure(target).w, radius};
  }
  throw IoError(path + ": descriptor needs f/c or target/radius");
}

}  // namespace jumpldp::io
