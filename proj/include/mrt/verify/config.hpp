#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mrt/diffops.hpp"

namespace mrt::verify {

enum class Format { json, csv, text };

inline std::string_view to_string(Format f) {
  switch (f) {
    case Format::json: return "json";
    case Format::csv: return "csv";
    case Format::text: return "text";
  }
  return "json";
}

/// Where a deliberate corruption is injected.
enum class SabotageTarget { none, saint_venant_k, recovery };

struct Sabotage {
  SabotageTarget target = SabotageTarget::none;
  Mutation mutation;

  bool active() const { return target != SabotageTarget::none && mutation.active(); }
  Mutation for_wk() const { return target == SabotageTarget::saint_venant_k ? mutation : Mutation{}; }
  Mutation for_recovery() const { return target == SabotageTarget::recovery ? mutation : Mutation{}; }
  std::string str() const;
};

/// "wk-sign:L", "wk-binomial:L", "recovery-sign:P", "recovery-binomial:P", "recovery-factor".
inline Sabotage parse_sabotage(std::string_view text) {
  Sabotage s;
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  std::optional<unsigned> term;
  if (colon != std::string_view::npos) {
    const std::string_view digits = text.substr(colon + 1);
    if (digits.empty() || digits.size() > 6 || digits.find_first_not_of("0123456789") != std::string_view::npos)
      throw argument_error("sabotage term must be a small non-negative integer: '" + std::string(text) + "'");
    term = static_cast<unsigned>(std::stoul(std::string(digits)));
  }
  auto need_term = [&] {
    if (!term) throw argument_error("sabotage '" + std::string(name) + "' needs a term index, e.g. " + std::string(name) + ":1");
    s.mutation.term = *term;
  };
  if (name == "wk-sign" || name == "wk-binomial") {
    need_term();
    s.target = SabotageTarget::saint_venant_k;
    s.mutation.kind = name == "wk-sign" ? Mutation::Kind::flip_sign : Mutation::Kind::bump_binomial;
  } else if (name == "recovery-sign" || name == "recovery-binomial") {
    need_term();
    s.target = SabotageTarget::recovery;
    s.mutation.kind = name == "recovery-sign" ? Mutation::Kind::flip_sign : Mutation::Kind::bump_binomial;
  } else if (name == "recovery-factor") {
    if (term) throw argument_error("recovery-factor takes no term index");
    s.target = SabotageTarget::recovery;
    s.mutation.kind = Mutation::Kind::bump_prefactor;
  } else {
    throw argument_error("unknown sabotage '" + std::string(text) +
                         "' (expected wk-sign:L, wk-binomial:L, recovery-sign:P, recovery-binomial:P or recovery-factor)");
  }
  return s;
}

inline std::string Sabotage::str() const {
  if (!active()) return "none";
  std::string prefix = target == SabotageTarget::saint_venant_k ? "wk-" : "recovery-";
  switch (mutation.kind) {
    case Mutation::Kind::flip_sign: return prefix + "sign:" + std::to_string(mutation.term);
    case Mutation::Kind::bump_binomial: return prefix + "binomial:" + std::to_string(mutation.term);
    case Mutation::Kind::bump_prefactor: return prefix + "factor";
    case Mutation::Kind::none: break;
  }
  return "none";
}

struct SuiteConfig {
  unsigned n = 2;
  unsigned m = 2;
  unsigned k = 1;
  std::uint64_t seed = 7;
  unsigned degree = 2;
  unsigned samples = 20;
  double tol_float = 1e-9;
  Format format = Format::json;
  Sabotage sabotage;

  void validate() const {
    if (n < 2) throw argument_error("n must be at least 2 (got " + std::to_string(n) + ")");
    if (k > m) throw argument_error("k must not exceed m (got k=" + std::to_string(k) + ", m=" + std::to_string(m) + ")");
    if (!(tol_float > 0)) throw argument_error("tolerance must be positive");
    if (samples == 0) throw argument_error("samples must be positive");
  }
};

}  // namespace mrt::verify
