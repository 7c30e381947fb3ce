#pragma once

#include <json.hpp>

#include "neretin/spheromorphism.hpp"

namespace neretin {

using Json = nlohmann::ordered_json;

inline Json group_to_json(const PermGroup& d) {
  Json out = Json::array();
  for (const auto& p : d.elements()) out.push_back(p.str());
  return out;
}

inline Json to_json(const Spheromorphism& g) {
  const auto& c = g.config();
  Json j;
  j["q"] = c.q;
  j["r"] = c.r;
  j["D"] = group_to_json(c.D);
  if (!g.is_group_element()) {
    j["domain_summands"] = g.domain_summands();
    j["codomain_summands"] = g.codomain_summands();
  }
  Json dom = Json::array(), cod = Json::array(), map = Json::array(), dec = Json::array();
  for (const auto& l : g.domain().leaves()) dom.push_back(l.str());
  for (const auto& l : g.codomain().leaves()) cod.push_back(l.str());
  for (auto i : g.images()) map.push_back(i);
  for (const auto& d : g.decorations()) {
    Json labels = Json::object();
    for (const auto& [w, p] : d.labels()) labels[word_str(w)] = p.str();
    dec.push_back(labels);
  }
  j["domain"] = dom;
  j["codomain"] = cod;
  j["map"] = map;
  j["decorations"] = dec;
  return j;
}

namespace detail {

template <class T>
T field(const Json& j, const char* name) {
  if (!j.contains(name)) throw InvalidArgument(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("field '") + name + "' has the wrong type");
  }
}

}  // namespace detail

/// Parses the element schema. Leaves may be listed in any order; "map" and
/// "decorations" follow the order of "domain".
inline Spheromorphism spheromorphism_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("element must be a JSON object");
  const int q = detail::field<int>(j, "q");
  const int r = detail::field<int>(j, "r");
  if (q < 2 || q > 9) throw InvalidArgument("q must be in 2..9");
  std::vector<Perm> gens;
  if (j.contains("D"))
    for (const auto& w : detail::field<std::vector<std::string>>(j, "D")) gens.push_back(Perm::parse(w));
  Config config(q, r, PermGroup(q, gens));
  const int m = j.contains("domain_summands") ? detail::field<int>(j, "domain_summands") : r;
  const int n = j.contains("codomain_summands") ? detail::field<int>(j, "codomain_summands") : r;

  auto dom = detail::field<std::vector<std::string>>(j, "domain");
  auto cod = detail::field<std::vector<std::string>>(j, "codomain");
  auto map = detail::field<std::vector<std::size_t>>(j, "map");
  if (map.size() != dom.size()) throw InvalidArgument("'map' must have one entry per domain leaf");
  if (cod.size() != dom.size()) throw InvalidArgument("domain and codomain sizes differ");
  std::vector<Json> decs(dom.size(), Json::object());
  if (j.contains("decorations")) {
    if (!j["decorations"].is_array() || j["decorations"].size() != dom.size())
      throw InvalidArgument("'decorations' must have one entry per domain leaf");
    for (std::size_t i = 0; i < dom.size(); ++i) decs[i] = j["decorations"][i];
  }

  std::vector<Spheromorphism::Piece> pieces;
  std::vector<bool> used(cod.size(), false);
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (map[i] >= cod.size() || used[map[i]]) throw InvalidArgument("'map' is not a bijection");
    used[map[i]] = true;
    LabeledIsometry iso(q);
    if (!decs[i].is_object()) throw InvalidArgument("decoration must be an object");
    for (const auto& [w, p] : decs[i].items()) {
      if (!p.is_string()) throw InvalidArgument("decoration label must be a permutation word");
      Perm label = Perm::parse(p.get<std::string>());
      if (label.degree() != q) throw InvalidArgument("decoration label has wrong degree");
      iso.set(parse_word(w, q), label);
    }
    pieces.push_back({Address::parse(dom[i], q), Address::parse(cod[map[i]], q), std::move(iso)});
  }
  return Spheromorphism::from_pieces(config, m, n, std::move(pieces));
}

}  // namespace neretin
