#pragma once

// Text format for fields:
//   {"n": 2, "rank": 2,
//    "components": {"1,1": [{"exp": [0, 1], "coef": "1/2"}], "1,2": [...]}}
// Keys may list indices in any order; they are folded to the canonical slot.

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mrt/polygauss.hpp"

namespace mrt::verify {

class field_parse_error : public std::runtime_error {
 public:
  field_parse_error(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

inline std::string serialize_field(const SymField& f) {
  nlohmann::ordered_json comps = nlohmann::ordered_json::object();
  for (const auto& [key, g] : f.components()) {
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const auto& [e, c] : g.poly().terms()) terms.push_back({{"exp", e}, {"coef", format_rational(c)}});
    comps[key.str()] = std::move(terms);
  }
  nlohmann::ordered_json doc;
  doc["n"] = f.dim();
  doc["rank"] = f.rank();
  doc["components"] = std::move(comps);
  return doc.dump(2) + "\n";
}

namespace detail {

struct Locator {
  std::string_view text;

  std::pair<std::size_t, std::size_t> at(std::size_t offset) const {
    offset = std::min(offset, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }

  // Offset of the `occurrence`-th appearance of the quoted string `token`
  // after `from`, or of `from` itself when not found.
  std::size_t find_quoted(std::string_view token, std::size_t from = 0, std::size_t occurrence = 0) const {
    const std::string needle = "\"" + std::string(token) + "\"";
    std::size_t pos = from;
    for (std::size_t seen = 0;; ++seen) {
      std::size_t hit = text.find(needle, pos);
      if (hit == std::string_view::npos) return from;
      if (seen == occurrence) return hit;
      pos = hit + 1;
    }
  }

  [[noreturn]] void fail(const std::string& what, std::size_t offset) const {
    auto [line, col] = at(offset);
    throw field_parse_error(what, line, col);
  }
};

inline IndexTuple parse_key(std::string_view key, unsigned n, unsigned rank, const Locator& loc, std::size_t offset) {
  std::vector<unsigned> idx;
  if (!key.empty()) {
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = key.find(',', start);
      const std::string_view part = key.substr(start, comma == std::string_view::npos ? key.size() - start : comma - start);
      if (part.empty() || part.size() > 9 || part.find_first_not_of("0123456789") != std::string_view::npos)
        loc.fail("malformed component key \"" + std::string(key) + "\"", offset);
      idx.push_back(static_cast<unsigned>(std::stoul(std::string(part))));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  if (idx.size() != rank)
    loc.fail("component key \"" + std::string(key) + "\" has " + std::to_string(idx.size()) + " indices, rank is " +
                 std::to_string(rank),
             offset);
  for (unsigned i : idx)
    if (i < 1 || i > n) loc.fail("index " + std::to_string(i) + " in key \"" + std::string(key) + "\" outside [1," + std::to_string(n) + "]", offset);
  return IndexTuple(std::move(idx)).canonical();
}

}  // namespace detail

inline SymField parse_field(std::string_view text) {
  using nlohmann::json;
  detail::Locator loc{text};

  // Exact duplicate keys are silently merged by most JSON readers; catch them
  // while parsing, tracking object nesting through the callback depth.
  std::map<std::string, std::size_t> component_keys;
  std::string duplicate;
  bool in_components = false;
  int components_depth = -1;
  std::string last_key;
  auto callback = [&](int depth, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::key) {
      const std::string key = parsed.get<std::string>();
      if (in_components && depth == components_depth + 1 && duplicate.empty()) {
        if (++component_keys[key] > 1) duplicate = key;
      }
      last_key = key;
    } else if (event == json::parse_event_t::object_start) {
      if (depth == 1 && last_key == "components") {
        in_components = true;
        components_depth = depth;
      }
    } else if (event == json::parse_event_t::object_end) {
      if (in_components && depth == components_depth) in_components = false;
    }
    return true;
  };

  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), callback);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    if (auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
    loc.fail(what, e.byte > 0 ? e.byte - 1 : 0);
  }
  if (!duplicate.empty())
    loc.fail("duplicate component key \"" + duplicate + "\"", loc.find_quoted(duplicate, loc.find_quoted("components"), 1));

  if (!doc.is_object()) loc.fail("top level must be an object", 0);
  auto require = [&](const char* name) -> const json& {
    if (!doc.contains(name)) loc.fail(std::string("missing field \"") + name + "\"", 0);
    return doc.at(name);
  };
  const json& jn = require("n");
  const json& jrank = require("rank");
  const json& jcomps = require("components");
  if (!jn.is_number_unsigned() || jn.get<unsigned long>() < 1 || jn.get<unsigned long>() > 64)
    loc.fail("\"n\" must be an integer in [1, 64]", loc.find_quoted("n"));
  if (!jrank.is_number_unsigned() || jrank.get<unsigned long>() > 32)
    loc.fail("\"rank\" must be an integer in [0, 32]", loc.find_quoted("rank"));
  if (!jcomps.is_object()) loc.fail("\"components\" must be an object", loc.find_quoted("components"));
  const unsigned n = jn.get<unsigned>(), rank = jrank.get<unsigned>();
  const std::size_t comps_at = loc.find_quoted("components");

  SymField f = make_field(n, rank);
  std::map<IndexTuple, std::string> seen;
  for (const auto& [key, terms] : jcomps.items()) {
    const std::size_t at = loc.find_quoted(key, comps_at);
    const IndexTuple slot = detail::parse_key(key, n, rank, loc, at);
    if (auto it = seen.find(slot); it != seen.end())
      loc.fail("component keys \"" + it->second + "\" and \"" + key + "\" name the same symmetric slot", at);
    seen.emplace(slot, key);
    if (!terms.is_array()) loc.fail("component \"" + key + "\" must be a list of terms", at);
    Polynomial p(n);
    for (const auto& term : terms) {
      if (!term.is_object() || !term.contains("exp") || !term.contains("coef"))
        loc.fail("terms of \"" + key + "\" need \"exp\" and \"coef\"", at);
      const json& je = term.at("exp");
      if (!je.is_array() || je.size() != n) loc.fail("\"exp\" in \"" + key + "\" must list " + std::to_string(n) + " exponents", at);
      Exponent e;
      for (const auto& d : je) {
        if (!d.is_number_unsigned() || d.get<unsigned long>() > 64) loc.fail("exponents in \"" + key + "\" must be integers in [0, 64]", at);
        e.push_back(d.get<unsigned>());
      }
      const json& jc = term.at("coef");
      Rational c;
      try {
        if (jc.is_string()) c = parse_rational(jc.get<std::string>());
        else if (jc.is_number_integer()) c = Rational(jc.get<long long>());
        else loc.fail("\"coef\" in \"" + key + "\" must be a string \"p/q\" or an integer", at);
      } catch (const argument_error& err) {
        loc.fail(std::string("bad coefficient in \"") + key + "\": " + err.what(), at);
      }
      p.add_term(e, c);
    }
    f.set(slot, PolyGauss(std::move(p)));
  }
  return f;
}

}  // namespace mrt::verify
