#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrt/verify/config.hpp"
#include "mrt/verify/suites.hpp"

namespace mrt::verify {

inline bool all_pass(const std::vector<SuiteResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

namespace detail {
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}
}  // namespace detail

inline std::string format_json(const SuiteConfig& c, const std::vector<SuiteResult>& results) {
  nlohmann::ordered_json doc;
  doc["config"] = {{"n", c.n},
                   {"m", c.m},
                   {"k", c.k},
                   {"seed", c.seed},
                   {"degree", c.degree},
                   {"samples", c.samples},
                   {"tol", c.tol_float},
                   {"sabotage", c.sabotage.str()}};
  nlohmann::ordered_json suites = nlohmann::ordered_json::array();
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& s : results) {
    suites.push_back({{"suite", s.suite}, {"pass", s.pass}, {"checks", s.records.size()}});
    for (const auto& r : s.records) {
      nlohmann::ordered_json j = {{"suite", r.suite},   {"check_id", r.check_id}, {"anchor", r.anchor},
                                  {"residual", r.residual}, {"exact", r.exact},   {"pass", r.pass}};
      if (r.expect_nonzero) j["expect"] = "nonzero";
      if (!r.note.empty()) j["note"] = r.note;
      records.push_back(std::move(j));
    }
  }
  doc["suites"] = std::move(suites);
  doc["records"] = std::move(records);
  doc["pass"] = all_pass(results);
  return doc.dump(2) + "\n";
}

inline std::string format_csv(const std::vector<SuiteResult>& results) {
  std::ostringstream os;
  os << "suite,check_id,anchor,residual,exact,pass,expect,note\n";
  for (const auto& s : results)
    for (const auto& r : s.records)
      os << r.suite << ',' << r.check_id << ',' << r.anchor << ',' << detail::format_double(r.residual) << ','
         << (r.exact ? "true" : "false") << ',' << (r.pass ? "true" : "false") << ','
         << (r.expect_nonzero ? "nonzero" : "zero") << ',' << detail::csv_field(r.note) << '\n';
  return os.str();
}

inline std::string format_text(const SuiteConfig& c, const std::vector<SuiteResult>& results) {
  std::ostringstream os;
  os << "config n=" << c.n << " m=" << c.m << " k=" << c.k << " seed=" << c.seed << " degree=" << c.degree
     << " samples=" << c.samples << " tol=" << detail::format_double(c.tol_float) << " sabotage=" << c.sabotage.str()
     << '\n';
  for (const auto& s : results) {
    std::size_t failed = 0;
    for (const auto& r : s.records) {
      if (!r.pass) ++failed;
      char line[256];
      std::snprintf(line, sizeof line, "%-4s %-10s %-36s %-26s %-5s %.3e", r.pass ? "ok" : "FAIL", r.suite.c_str(),
                    r.check_id.c_str(), r.anchor.c_str(), r.exact ? "exact" : "float", r.residual);
      os << line;
      if (r.expect_nonzero) os << " (witness)";
      if (!r.note.empty()) os << "  # " << r.note;
      os << '\n';
    }
    os << "suite " << s.suite << ": " << (s.pass ? "PASS" : "FAIL") << " (" << s.records.size() - failed << '/'
       << s.records.size() << " checks)\n";
  }
  os << (all_pass(results) ? "PASS" : "FAIL") << '\n';
  return os.str();
}

inline std::string format_report(const SuiteConfig& c, const std::vector<SuiteResult>& results) {
  switch (c.format) {
    case Format::json: return format_json(c, results);
    case Format::csv: return format_csv(results);
    case Format::text: return format_text(c, results);
  }
  return format_json(c, results);
}

}  // namespace mrt::verify
