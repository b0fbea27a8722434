#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "butcher/prelie.hpp"
#include "butcher/rational.hpp"
#include "butcher/series.hpp"
#include "butcher/tableau.hpp"
#include "butcher/tree.hpp"

namespace butcher {

using json = nlohmann::json;

// Series wire format: list of {"tree": canonical encoding, "coeff": reduced
// fraction string}, with the empty tree encoded as "", in canonical order.
inline json series_to_json(const BSeries& s) {
  json out = json::array();
  out.push_back({{"tree", ""}, {"coeff", to_fraction_string(s.empty)}});
  for (const auto& [t, c] : s.coeff)
    out.push_back({{"tree", t.encoding()}, {"coeff", to_fraction_string(c)}});
  return out;
}

inline BSeries series_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("series JSON must be an array");
  BSeries s;
  bool saw_empty = false;
  for (const auto& rec : j) {
    std::string enc = rec.at("tree").get<std::string>();
    Rational c = parse_fraction(rec.at("coeff").get<std::string>());
    if (enc.empty()) {
      s.empty = c;
      saw_empty = true;
    } else {
      Tree t = Tree::parse(enc);
      s.order = std::max(s.order, t.order());
      s.coeff[t] = c;
    }
  }
  if (!saw_empty) throw std::invalid_argument("series JSON misses the empty-tree record");
  // every canonical tree up to the truncation order must be present
  for (const Tree& t : trees_up_to(s.order))
    if (!s.coeff.count(t)) throw std::invalid_argument("series JSON misses tree " + t.encoding());
  return s;
}

inline json combination_to_json(const TreeCombination& c) {
  json out = json::array();
  for (const auto& [t, v] : c.terms)
    out.push_back({{"tree", t.encoding()}, {"coeff", to_fraction_string(v)}});
  return out;
}

// Tableau format: {"stages": n, "a": n x n, "b": n}, entries as fraction
// strings or numbers; any numeric entry forces floating mode.
inline json tableau_to_json(const Tableau& t) {
  json out;
  out["stages"] = t.stages;
  if (t.exact_mode()) {
    json a = json::array();
    for (const auto& row : t.exact->first) {
      json r = json::array();
      for (const Rational& v : row) r.push_back(to_fraction_string(v));
      a.push_back(r);
    }
    json b = json::array();
    for (const Rational& v : t.exact->second) b.push_back(to_fraction_string(v));
    out["a"] = a;
    out["b"] = b;
  } else {
    out["a"] = t.a;
    out["b"] = t.b;
  }
  return out;
}

inline Tableau tableau_from_json(const json& j) {
  int stages = j.at("stages").get<int>();
  if (stages < 1) throw std::invalid_argument("stage count must be positive");
  const json& a = j.at("a");
  const json& b = j.at("b");
  if (static_cast<int>(a.size()) != stages || static_cast<int>(b.size()) != stages)
    throw std::invalid_argument("tableau shape mismatch");

  bool exact = true;
  auto scan = [&exact](const json& v) {
    if (v.is_number()) exact = false;
    else if (!v.is_string()) throw std::invalid_argument("tableau entries must be numbers or fraction strings");
  };
  for (const auto& row : a) {
    if (static_cast<int>(row.size()) != stages) throw std::invalid_argument("tableau shape mismatch");
    for (const auto& v : row) scan(v);
  }
  for (const auto& v : b) scan(v);

  auto as_rational = [](const json& v) { return parse_fraction(v.get<std::string>()); };
  auto as_double = [](const json& v) {
    return v.is_number() ? v.get<double>() : to_double(parse_fraction(v.get<std::string>()));
  };

  if (exact) {
    std::vector<std::vector<Rational>> ra(static_cast<std::size_t>(stages));
    std::vector<Rational> rb;
    for (int i = 0; i < stages; ++i)
      for (const auto& v : a[static_cast<std::size_t>(i)]) ra[static_cast<std::size_t>(i)].push_back(as_rational(v));
    for (const auto& v : b) rb.push_back(as_rational(v));
    return make_exact_tableau(std::move(ra), std::move(rb));
  }
  Tableau t;
  t.stages = stages;
  t.a.resize(static_cast<std::size_t>(stages));
  for (int i = 0; i < stages; ++i)
    for (const auto& v : a[static_cast<std::size_t>(i)]) t.a[static_cast<std::size_t>(i)].push_back(as_double(v));
  for (const auto& v : b) t.b.push_back(as_double(v));
  return t;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

// Built-in series by name, else a path to a serialized series.
inline BSeries named_series(const std::string& name, int order, int cap = kDefaultOrderCap) {
  if (name == "exact") return exact_flow_series(order, cap);
  if (name == "euler") return euler_series(order, cap);
  if (name == "avf") return avf_series(order, cap);
  if (name == "expint") return exponential_integrator_series(order, cap);
  if (name == "identity") return identity_series(order, cap);
  BSeries s = series_from_json(load_json_file(name));
  if (s.order != order)
    throw std::invalid_argument("series file truncation order " + std::to_string(s.order) +
                                " does not match requested order " + std::to_string(order));
  return s;
}

}  // namespace butcher
