#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace fzeta::strings {

struct StringSpec;
using SpecPtr = std::shared_ptr<const StringSpec>;

struct AString {
  double a = 1.0;
};

struct CantorString {};

struct GeneralizedCantor {
  int m = 2;
  double a = 1.0 / 3.0;
};

struct NthOrderCantor {
  int n = 1;
};

struct ExtendedSelfSimilar {
  SpecPtr base;
  std::vector<double> ratios;
};

struct Scaled {
  double c = 1.0;
  SpecPtr inner;
};

struct Union {
  std::vector<SpecPtr> parts;
};

struct Tensor {
  SpecPtr left;
  SpecPtr right;
};

/// Union of c_k-scaled generalized Cantor strings C^(m_k, a_k), a_k = m_k^{-1/D}, k = 1..K.
/// When c_geometric_ratio > 0, c_k = r^k and the omitted components k > K are
/// accounted for in the tail bound; otherwise c lists all weights explicitly.
struct Hyperfractal {
  double D = 0.5;
  std::vector<long> m;
  std::vector<double> c;
  double c_geometric_ratio = 0.0;
};

struct Trivial {
  double length = 1.0;
};

struct StringSpec {
  std::variant<AString, CantorString, GeneralizedCantor, NthOrderCantor, ExtendedSelfSimilar, Scaled, Union,
               Tensor, Hyperfractal, Trivial>
      node;
};

template <typename T>
SpecPtr make_spec(T node) {
  return std::make_shared<const StringSpec>(StringSpec{std::move(node)});
}

/// Throws InvalidSpec when a parameter constraint is violated (recursively).
void validate(const StringSpec& spec);

std::string describe(const StringSpec& spec);

/// JSON form: {"kind": "...", ...parameters}. Hyperfractal accepts
/// "m": [..] or {"start": s, "step": d} and "c": [..] or {"geometric": r}, with "K".
SpecPtr spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const StringSpec& spec);

}  // namespace fzeta::strings
