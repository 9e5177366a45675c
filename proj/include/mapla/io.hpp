#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mapla/linalg.hpp"
#include "mapla/potential.hpp"

namespace mapla {

/// Shortest round-trip form is not needed; "%.17g" is stable and exact.
std::string format_double(double v);

/// Header row on construction, one line per row(); fields are not quoted,
/// so callers keep commas out of string cells.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double v);
  CsvWriter& cell(long v);
  CsvWriter& cell(int v) { return cell(static_cast<long>(v)); }
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long>(v)); }
  void end_row();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// Parsed JSON with the source location of every value, keyed by JSON
/// pointer, so validation errors can name a line.
class JsonDoc {
 public:
  static JsonDoc parse(const std::string& text, std::string origin);
  static JsonDoc load(const std::filesystem::path& path);

  const nlohmann::json& root() const { return root_; }
  const std::string& origin() const { return origin_; }

  /// "origin:line:col: pointer: message" located at the pointer, or at its
  /// nearest recorded ancestor when the pointer names a missing key.
  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const;
  std::string locate(const std::string& pointer) const;

 private:
  nlohmann::json root_;
  std::string origin_;
  std::map<std::string, std::pair<int, int>> positions_;
};

/// Typed accessors that report failures through JsonDoc::fail.
class JsonView {
 public:
  JsonView(const JsonDoc& doc, std::string pointer);

  const nlohmann::json& value() const;
  const std::string& pointer() const { return pointer_; }
  const JsonDoc& doc() const { return *doc_; }
  bool has(const std::string& key) const;
  JsonView at(const std::string& key) const;
  JsonView at(std::size_t index) const;
  std::size_t size() const;

  double number() const;
  long integer() const;
  std::string string() const;
  bool boolean() const;
  Vec vector() const;
  Mat matrix() const;

  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::string string(const std::string& key, const std::string& fallback) const;

  /// Rejects keys outside `allowed`.
  void only_keys(const std::vector<std::string>& allowed) const;

  [[noreturn]] void fail(const std::string& message) const { doc_->fail(pointer_, message); }

 private:
  const JsonDoc* doc_;
  std::string pointer_;
};

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const Mat& m);

/// d feature columns then a 0/1 label column; an optional header row is
/// skipped when its first cell is not numeric.
BlrData load_blr_csv(const std::filesystem::path& path);

/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace mapla
