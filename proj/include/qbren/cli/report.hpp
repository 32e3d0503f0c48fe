#pragma once

#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qbren::cli {

using json = nlohmann::ordered_json;

enum class CheckStatus { pass, fail, inconclusive };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::inconclusive:
      return "inconclusive";
  }
  return "?";
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::variant<double, std::string>>> rows;
};

inline std::string format_number(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << x;
  return os.str();
}

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      if (auto d = std::get_if<double>(&row[i]))
        os << format_number(*d);
      else
        os << std::get<std::string>(row[i]);
    }
    os << "\n";
  }
  return os.str();
}

// JSON cannot carry inf/nan, they are written as strings
inline json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

class RunReport {
 public:
  explicit RunReport(std::string study) { doc_["study"] = std::move(study); }

  void set(const std::string& key, json value) { doc_[key] = std::move(value); }
  json& payload() { return payload_; }

  void check(const std::string& name, CheckStatus s, json details = json::object()) {
    json c;
    c["name"] = name;
    c["status"] = to_string(s);
    if (!details.empty()) c["details"] = std::move(details);
    if (s == CheckStatus::fail) ++failed_;
    checks_.push_back(std::move(c));
  }
  void check(const std::string& name, bool ok, json details = json::object()) {
    check(name, ok ? CheckStatus::pass : CheckStatus::fail, std::move(details));
  }

  // value <= tol, recorded with both numbers
  void check_le(const std::string& name, double value, double tol, json extra = json::object()) {
    extra["value"] = number(value);
    extra["tolerance"] = tol;
    check(name, std::isfinite(value) && value <= tol, std::move(extra));
  }

  void merge(const RunReport& other) {
    for (auto& c : other.checks_) checks_.push_back(c);
    failed_ += other.failed_;
    payload_[other.doc_["study"].get<std::string>()] = other.payload_;
  }

  int failures() const { return failed_; }
  const json& checks() const { return checks_; }

  json to_json() const {
    json out = doc_;
    out["checks"] = checks_;
    out["failed"] = failed_;
    out["results"] = payload_;
    return out;
  }

 private:
  json doc_;
  json checks_ = json::array();
  json payload_ = json::object();
  int failed_ = 0;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

}  // namespace qbren::cli
