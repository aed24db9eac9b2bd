#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "teachcert/errors.hpp"
#include "teachcert/model.hpp"

namespace teachcert {

using nlohmann::json;

namespace {

const std::set<std::string> kTopLevelKeys = {
    "hypotheses", "labels", "examples", "preference", "p0", "target", "T_override",
    "observation_variant"};
const std::set<std::string> kRequiredKeys = {"hypotheses", "labels", "examples",
                                             "preference", "p0", "target"};

Rational rational_field(const json& v, const std::string& where) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw SchemaError(where + ": rationals must be strings (\"num/den\" or decimal) or integers");
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw SchemaError(where + ": unexpected field '" + key + "'");
  for (const auto& key : required)
    if (!obj.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
}

PreferenceFunction parse_preference(const json& p, std::size_t n) {
  require_keys(p, {"kind", "table", "rows", "cols"}, {"kind"}, "preference");
  const std::string kind = p.at("kind").get<std::string>();
  if (kind == "win-stay-lose-shift") {
    if (p.contains("table") || p.contains("rows")) throw SchemaError("preference: unexpected fields for win-stay-lose-shift");
    return PreferenceFunction::win_stay_lose_shift(n);
  }
  if (kind == "l1-lattice") {
    if (!p.contains("rows") || !p.contains("cols"))
      throw SchemaError("preference: l1-lattice needs rows and cols");
    LatticeShape shape{p.at("rows").get<int>(), p.at("cols").get<int>()};
    if (static_cast<std::size_t>(shape.rows * shape.cols) != n)
      throw InvariantViolation("lattice shape does not match hypothesis count");
    return PreferenceFunction::l1_lattice(shape);
  }
  if (kind == "explicit-table") {
    if (!p.contains("table")) throw SchemaError("preference: explicit-table needs table");
    std::vector<RationalVector> table;
    for (const auto& row : p.at("table")) {
      RationalVector r;
      for (const auto& v : row) r.push_back(rational_field(v, "preference.table"));
      table.push_back(std::move(r));
    }
    if (table.size() != n) throw InvariantViolation("preference table size does not match |H|");
    return PreferenceFunction::explicit_table(std::move(table));
  }
  throw SchemaError("preference: unknown kind '" + kind + "'");
}

json preference_json(const PreferenceFunction& p) {
  switch (p.kind()) {
    case PreferenceKind::WinStayLoseShift:
      return {{"kind", "win-stay-lose-shift"}};
    case PreferenceKind::L1Lattice:
      return {{"kind", "l1-lattice"}, {"rows", p.lattice()->rows}, {"cols", p.lattice()->cols}};
    case PreferenceKind::ExplicitTable: {
      json table = json::array();
      for (const auto& row : p.table()) {
        json r = json::array();
        for (const auto& v : row) r.push_back(to_string(v));
        table.push_back(r);
      }
      return {{"kind", "explicit-table"}, {"table", table}};
    }
  }
  return {};
}

}  // namespace

LearningPomdp load_pomdp(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("scenario is not valid JSON: ") + e.what());
  }
  require_keys(doc, kTopLevelKeys, kRequiredKeys, "scenario");
  try {
    PomdpSpec spec;
    for (const auto& row : doc.at("hypotheses")) {
      Hypothesis h{spec.space.hypotheses.size(), row.get<std::vector<Label>>()};
      spec.space.hypotheses.push_back(std::move(h));
    }
    spec.space.num_unlabeled =
        spec.space.hypotheses.empty() ? 0 : spec.space.hypotheses.front().label_row.size();
    spec.labels = doc.at("labels").get<std::vector<Label>>();
    for (const auto& ex : doc.at("examples")) {
      require_keys(ex, {"x", "y_star"}, {"x", "y_star"}, "examples[]");
      spec.examples.push_back({ex.at("x").get<std::size_t>(), ex.at("y_star").get<Label>()});
    }
    spec.preference = parse_preference(doc.at("preference"), spec.space.size());
    for (const auto& v : doc.at("p0")) spec.p0.push_back(rational_field(v, "p0"));
    spec.target = doc.at("target").get<std::size_t>();
    if (doc.contains("observation_variant")) {
      const auto v = doc.at("observation_variant").get<std::string>();
      if (v == "label") spec.variant = ObservationVariant::Label;
      else if (v == "hypothesis") spec.variant = ObservationVariant::Hypothesis;
      else throw SchemaError("observation_variant must be \"label\" or \"hypothesis\"");
    }
    if (doc.contains("T_override")) {
      const auto& t = doc.at("T_override");
      const std::size_t n = spec.space.size(), nz = spec.examples.size();
      if (t.size() != n) throw InvariantViolation("T_override must have |H| slices");
      TransitionKernel T(n, nz);
      for (std::size_t h = 0; h < n; ++h) {
        if (t[h].size() != nz) throw InvariantViolation("T_override[h] must have |Z| rows");
        for (std::size_t z = 0; z < nz; ++z) {
          if (t[h][z].size() != n) throw InvariantViolation("T_override[h][z] must have |H| entries");
          for (std::size_t hn = 0; hn < n; ++hn) T(h, z, hn) = rational_field(t[h][z][hn], "T_override");
        }
      }
      spec.transition_override = std::move(T);
    }
    return make_pomdp(std::move(spec));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("scenario field has the wrong type: ") + e.what());
  }
}

LearningPomdp load_pomdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_pomdp(buf.str());
}

std::string scenario_json(const LearningPomdp& pomdp) {
  json doc;
  json hyps = json::array();
  for (const auto& h : pomdp.space().hypotheses) hyps.push_back(h.label_row);
  doc["hypotheses"] = hyps;
  doc["labels"] = pomdp.labels();
  json exs = json::array();
  for (const auto& z : pomdp.examples()) exs.push_back({{"x", z.x}, {"y_star", z.y_star}});
  doc["examples"] = exs;
  doc["preference"] = preference_json(pomdp.preference());
  json p0 = json::array();
  for (const auto& p : pomdp.p0()) p0.push_back(to_string(p));
  doc["p0"] = p0;
  doc["target"] = pomdp.target();
  doc["observation_variant"] =
      pomdp.variant() == ObservationVariant::Label ? "label" : "hypothesis";
  if (pomdp.has_transition_override()) {
    const auto& T = pomdp.T();
    json t = json::array();
    for (std::size_t h = 0; h < pomdp.num_hypotheses(); ++h) {
      json slice = json::array();
      for (std::size_t z = 0; z < pomdp.num_examples(); ++z) {
        json row = json::array();
        for (std::size_t hn = 0; hn < pomdp.num_hypotheses(); ++hn) row.push_back(to_string(T(h, z, hn)));
        slice.push_back(row);
      }
      t.push_back(slice);
    }
    doc["T_override"] = t;
  }
  return doc.dump(2);
}

std::string pomdp_digest(const LearningPomdp& pomdp) {
  const std::string canonical = json::parse(scenario_json(pomdp)).dump();
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace teachcert
