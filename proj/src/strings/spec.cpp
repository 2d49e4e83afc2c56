#include "fzeta/strings/spec.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "fzeta/common.hpp"

namespace fzeta::strings {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

void require_child(const SpecPtr& p, const char* what) {
  if (!p) invalid(std::string(what) + " is missing");
  validate(*p);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

void validate(const StringSpec& spec) {
  std::visit(
      [](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AString>) {
          if (!(n.a > 0.0)) invalid("a-string requires a > 0");
        } else if constexpr (std::is_same_v<T, GeneralizedCantor>) {
          if (n.m < 2) invalid("generalized Cantor requires m >= 2");
          if (!(n.a > 0.0) || !(n.m * n.a < 1.0)) invalid("generalized Cantor requires 0 < a and m*a < 1");
        } else if constexpr (std::is_same_v<T, NthOrderCantor>) {
          if (n.n < 1) invalid("n-th order Cantor string requires n >= 1");
        } else if constexpr (std::is_same_v<T, ExtendedSelfSimilar>) {
          require_child(n.base, "extended self-similar base");
          if (n.ratios.empty()) invalid("extended self-similar string needs at least one ratio");
          double sum = 0.0;
          for (double r : n.ratios) {
            if (!(r > 0.0 && r < 1.0)) invalid("scaling ratios must lie in (0, 1)");
            sum += r;
          }
          if (!(sum < 1.0)) invalid("scaling ratios must sum to less than 1");
        } else if constexpr (std::is_same_v<T, Scaled>) {
          if (!(n.c > 0.0)) invalid("scale factor must be positive");
          require_child(n.inner, "scaled inner string");
        } else if constexpr (std::is_same_v<T, Union>) {
          if (n.parts.empty()) invalid("union needs at least one part");
          for (const auto& p : n.parts) require_child(p, "union part");
        } else if constexpr (std::is_same_v<T, Tensor>) {
          require_child(n.left, "tensor left factor");
          require_child(n.right, "tensor right factor");
        } else if constexpr (std::is_same_v<T, Hyperfractal>) {
          if (!(n.D > 0.0 && n.D < 1.0)) invalid("hyperfractal requires D in (0, 1)");
          if (n.m.empty()) invalid("hyperfractal requires at least one component");
          if (n.m.size() != n.c.size()) invalid("hyperfractal m and c must have equal length");
          if (n.m.front() < 2) invalid("hyperfractal requires m_1 >= 2");
          for (std::size_t k = 1; k < n.m.size(); ++k)
            if (n.m[k] <= n.m[k - 1]) invalid("hyperfractal m_k must be strictly increasing");
          for (double c : n.c)
            if (!(c > 0.0)) invalid("hyperfractal weights c_k must be positive");
          if (n.c_geometric_ratio < 0.0 || n.c_geometric_ratio >= 1.0)
            invalid("geometric weight ratio must lie in [0, 1)");
        } else if constexpr (std::is_same_v<T, Trivial>) {
          if (!(n.length > 0.0)) invalid("trivial string needs a positive length");
        }
      },
      spec.node);
}

std::string describe(const StringSpec& spec) {
  std::ostringstream out;
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AString>) {
          out << "a-string(a=" << n.a << ")";
        } else if constexpr (std::is_same_v<T, CantorString>) {
          out << "cantor";
        } else if constexpr (std::is_same_v<T, GeneralizedCantor>) {
          out << "generalized-cantor(m=" << n.m << ",a=" << n.a << ")";
        } else if constexpr (std::is_same_v<T, NthOrderCantor>) {
          out << "nth-order-cantor(n=" << n.n << ")";
        } else if constexpr (std::is_same_v<T, ExtendedSelfSimilar>) {
          out << describe(*n.base) << " (x) L(";
          for (std::size_t i = 0; i < n.ratios.size(); ++i) out << (i ? "," : "") << n.ratios[i];
          out << ")";
        } else if constexpr (std::is_same_v<T, Scaled>) {
          out << n.c << "*" << describe(*n.inner);
        } else if constexpr (std::is_same_v<T, Union>) {
          out << "union(";
          for (std::size_t i = 0; i < n.parts.size(); ++i) out << (i ? "," : "") << describe(*n.parts[i]);
          out << ")";
        } else if constexpr (std::is_same_v<T, Tensor>) {
          out << "(" << describe(*n.left) << " (x) " << describe(*n.right) << ")";
        } else if constexpr (std::is_same_v<T, Hyperfractal>) {
          out << "hyperfractal(D=" << n.D << ",K=" << n.m.size() << ")";
        } else if constexpr (std::is_same_v<T, Trivial>) {
          out << "trivial(" << n.length << ")";
        }
      },
      spec.node);
  return out.str();
}

SpecPtr spec_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    SpecPtr out;
    if (kind == "a_string") {
      out = make_spec(AString{get_or(j, "a", 1.0)});
    } else if (kind == "cantor") {
      out = make_spec(CantorString{});
    } else if (kind == "generalized_cantor") {
      out = make_spec(GeneralizedCantor{j.at("m").get<int>(), j.at("a").get<double>()});
    } else if (kind == "nth_order_cantor") {
      out = make_spec(NthOrderCantor{j.at("n").get<int>()});
    } else if (kind == "extended_self_similar") {
      out = make_spec(ExtendedSelfSimilar{spec_from_json(j.at("base")), j.at("ratios").get<std::vector<double>>()});
    } else if (kind == "scaled") {
      out = make_spec(Scaled{j.at("c").get<double>(), spec_from_json(j.at("inner"))});
    } else if (kind == "union") {
      Union u;
      for (const auto& p : j.at("parts")) u.parts.push_back(spec_from_json(p));
      out = make_spec(std::move(u));
    } else if (kind == "tensor") {
      out = make_spec(Tensor{spec_from_json(j.at("left")), spec_from_json(j.at("right"))});
    } else if (kind == "hyperfractal") {
      Hyperfractal h;
      h.D = j.at("D").get<double>();
      const auto& m = j.at("m");
      const auto& c = j.at("c");
      std::size_t count = 0;
      if (j.contains("K")) {
        count = j.at("K").get<std::size_t>();
      } else if (m.is_array()) {
        count = m.size();
      } else {
        invalid("hyperfractal needs K when m is not an explicit list");
      }
      if (m.is_array()) {
        h.m = m.get<std::vector<long>>();
        if (h.m.size() < count) invalid("hyperfractal m list shorter than K");
        h.m.resize(count);
      } else {
        const long start = m.at("start").get<long>();
        const long step = get_or(m, "step", 1L);
        for (std::size_t k = 0; k < count; ++k) h.m.push_back(start + step * static_cast<long>(k));
      }
      if (c.is_array()) {
        h.c = c.get<std::vector<double>>();
        if (h.c.size() < count) invalid("hyperfractal c list shorter than K");
        h.c.resize(count);
      } else {
        h.c_geometric_ratio = c.at("geometric").get<double>();
        for (std::size_t k = 1; k <= count; ++k) h.c.push_back(std::pow(h.c_geometric_ratio, static_cast<double>(k)));
      }
      out = make_spec(std::move(h));
    } else if (kind == "trivial") {
      out = make_spec(Trivial{get_or(j, "length", 1.0)});
    } else {
      invalid("unknown string kind '" + kind + "'");
    }
    validate(*out);
    return out;
  } catch (const json::exception& e) {
    invalid(std::string("malformed string spec: ") + e.what());
  }
}

json spec_to_json(const StringSpec& spec) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AString>) {
          return {{"kind", "a_string"}, {"a", n.a}};
        } else if constexpr (std::is_same_v<T, CantorString>) {
          return {{"kind", "cantor"}};
        } else if constexpr (std::is_same_v<T, GeneralizedCantor>) {
          return {{"kind", "generalized_cantor"}, {"m", n.m}, {"a", n.a}};
        } else if constexpr (std::is_same_v<T, NthOrderCantor>) {
          return {{"kind", "nth_order_cantor"}, {"n", n.n}};
        } else if constexpr (std::is_same_v<T, ExtendedSelfSimilar>) {
          return {{"kind", "extended_self_similar"}, {"base", spec_to_json(*n.base)}, {"ratios", n.ratios}};
        } else if constexpr (std::is_same_v<T, Scaled>) {
          return {{"kind", "scaled"}, {"c", n.c}, {"inner", spec_to_json(*n.inner)}};
        } else if constexpr (std::is_same_v<T, Union>) {
          json parts = json::array();
          for (const auto& p : n.parts) parts.push_back(spec_to_json(*p));
          return {{"kind", "union"}, {"parts", parts}};
        } else if constexpr (std::is_same_v<T, Tensor>) {
          return {{"kind", "tensor"}, {"left", spec_to_json(*n.left)}, {"right", spec_to_json(*n.right)}};
        } else if constexpr (std::is_same_v<T, Hyperfractal>) {
          json j = {{"kind", "hyperfractal"}, {"D", n.D}, {"K", n.m.size()}, {"m", n.m}};
          if (n.c_geometric_ratio > 0.0)
            j["c"] = {{"geometric", n.c_geometric_ratio}};
          else
            j["c"] = n.c;
          return j;
        } else {
          return {{"kind", "trivial"}, {"length", n.length}};
        }
      },
      spec.node);
}

}  // namespace fzeta::strings
