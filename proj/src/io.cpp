#include "mapla/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "mapla/errors.hpp"

namespace mapla {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw IoError("cannot write " + path.string());
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (filled_ > 0) out_ << ',';
  out_ << s;
  ++filled_;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }
CsvWriter& CsvWriter::cell(long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (filled_ != columns_) {
    throw std::logic_error("csv " + path_.string() + ": row has " + std::to_string(filled_) +
                           " cells, header has " + std::to_string(columns_));
  }
  out_ << '\n';
  filled_ = 0;
  if (!out_) throw IoError("write failed: " + path_.string());
}

// ---------------------------------------------------------------------------

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Walks text that nlohmann already accepted and records where each value
// starts. Keys with escape sequences are decoded through nlohmann itself.
class PositionScanner {
 public:
  PositionScanner(const std::string& text, std::map<std::string, std::pair<int, int>>& out)
      : s_(text), out_(out) {}

  void run() {
    skip_ws();
    value("");
  }

 private:
  const std::string& s_;
  std::map<std::string, std::pair<int, int>>& out_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;

  void advance() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\n' || s_[i_] == '\r')) {
      advance();
    }
  }

  std::string string_token() {
    const std::size_t start = i_;
    advance();  // opening quote
    bool escaped = false;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') {
        escaped = true;
        advance();
      }
      advance();
    }
    advance();  // closing quote
    const std::string raw = s_.substr(start, i_ - start);
    if (!escaped) return raw.substr(1, raw.size() - 2);
    return nlohmann::json::parse(raw).get<std::string>();
  }

  void value(const std::string& ptr) {
    out_[ptr] = {line_, col_};
    if (s_[i_] == '{') {
      advance();
      skip_ws();
      while (s_[i_] != '}') {
        const std::string key = string_token();
        skip_ws();
        advance();  // ':'
        skip_ws();
        value(ptr + "/" + escape_token(key));
        skip_ws();
        if (s_[i_] == ',') {
          advance();
          skip_ws();
        }
      }
      advance();
    } else if (s_[i_] == '[') {
      advance();
      skip_ws();
      std::size_t index = 0;
      while (s_[i_] != ']') {
        value(ptr + "/" + std::to_string(index++));
        skip_ws();
        if (s_[i_] == ',') {
          advance();
          skip_ws();
        }
      }
      advance();
    } else if (s_[i_] == '"') {
      string_token();
    } else {
      while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != '}' && s_[i_] != ' ' &&
             s_[i_] != '\n' && s_[i_] != '\r' && s_[i_] != '\t') {
        advance();
      }
    }
  }
};

std::pair<int, int> line_col_at(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

JsonDoc JsonDoc::parse(const std::string& text, std::string origin) {
  JsonDoc doc;
  doc.origin_ = std::move(origin);
  try {
    doc.root_ = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_col_at(text, e.byte);
    std::string what = e.what();
    const auto cut = what.find("syntax error");
    if (cut != std::string::npos) what = what.substr(cut);
    throw ConfigError(doc.origin_ + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": invalid JSON: " + what);
  }
  PositionScanner(text, doc.positions_).run();
  return doc;
}

JsonDoc JsonDoc::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string JsonDoc::locate(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    auto it = positions_.find(p);
    if (it != positions_.end()) {
      return origin_ + ":" + std::to_string(it->second.first) + ":" +
             std::to_string(it->second.second);
    }
    if (p.empty()) return origin_;
    p = p.substr(0, p.rfind('/'));
  }
}

void JsonDoc::fail(const std::string& pointer, const std::string& message) const {
  throw ConfigError(locate(pointer) + ": " + (pointer.empty() ? "/" : pointer) + ": " + message);
}

// ---------------------------------------------------------------------------

JsonView::JsonView(const JsonDoc& doc, std::string pointer) : doc_(&doc), pointer_(std::move(pointer)) {}

const nlohmann::json& JsonView::value() const {
  const nlohmann::json::json_pointer jp(pointer_);
  if (!doc_->root().contains(jp)) doc_->fail(pointer_, "missing value");
  return doc_->root().at(jp);
}

bool JsonView::has(const std::string& key) const {
  const auto& v = value();
  return v.is_object() && v.contains(key);
}

JsonView JsonView::at(const std::string& key) const {
  const auto& v = value();
  if (!v.is_object()) fail("expected an object");
  const std::string child = pointer_ + "/" + escape_token(key);
  if (!v.contains(key)) doc_->fail(child, "missing required key '" + key + "'");
  return JsonView(*doc_, child);
}

JsonView JsonView::at(std::size_t index) const {
  const auto& v = value();
  if (!v.is_array()) fail("expected an array");
  if (index >= v.size()) fail("index " + std::to_string(index) + " out of range");
  return JsonView(*doc_, pointer_ + "/" + std::to_string(index));
}

std::size_t JsonView::size() const {
  const auto& v = value();
  if (!v.is_array() && !v.is_object()) fail("expected an array or object");
  return v.size();
}

double JsonView::number() const {
  const auto& v = value();
  if (!v.is_number()) fail("expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail("expected a finite number");
  return x;
}

long JsonView::integer() const {
  const auto& v = value();
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && std::floor(x) == x && std::abs(x) < 9e15) return static_cast<long>(x);
  }
  fail("expected an integer");
}

std::string JsonView::string() const {
  const auto& v = value();
  if (!v.is_string()) fail("expected a string");
  return v.get<std::string>();
}

bool JsonView::boolean() const {
  const auto& v = value();
  if (!v.is_boolean()) fail("expected true or false");
  return v.get<bool>();
}

Vec JsonView::vector() const {
  const auto& v = value();
  if (!v.is_array()) fail("expected an array of numbers");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = at(i).number();
  return out;
}

Mat JsonView::matrix() const {
  const auto& v = value();
  if (!v.is_array() || v.empty()) fail("expected a non-empty array of rows");
  const std::size_t cols = at(std::size_t{0}).size();
  Mat out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const JsonView row = at(i);
    if (row.size() != cols) row.fail("row length differs from the first row");
    out.row(static_cast<Eigen::Index>(i)) = row.vector().transpose();
  }
  return out;
}

double JsonView::number(const std::string& key, double fallback) const {
  return has(key) ? at(key).number() : fallback;
}

long JsonView::integer(const std::string& key, long fallback) const {
  return has(key) ? at(key).integer() : fallback;
}

std::string JsonView::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? at(key).string() : fallback;
}

void JsonView::only_keys(const std::vector<std::string>& allowed) const {
  const auto& v = value();
  if (!v.is_object()) fail("expected an object");
  for (const auto& item : v.items()) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == item.key();
    if (!ok) doc_->fail(pointer_ + "/" + escape_token(item.key()), "unknown key '" + item.key() + "'");
  }
}

nlohmann::json to_json(const Vec& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

nlohmann::json to_json(const Mat& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) j.push_back(to_json(Vec(m.row(i).transpose())));
  return j;
}

BlrData load_blr_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": non-numeric cell");
    }
    if (row.size() < 2) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": need features and a label");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": column count differs");
    }
    if (row.back() != 0.0 && row.back() != 1.0) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": label must be 0 or 1");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path.string() + ": no data rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front().size()) - 1;
  Mat x(n, d);
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    y(i) = rows[static_cast<std::size_t>(i)].back();
  }
  return BlrData(std::move(x), std::move(y));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace mapla
