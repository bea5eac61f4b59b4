#include "dtsel/formats.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "dtsel/error.hpp"

namespace dtsel {

namespace {

bool plain_identifier(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string dot_id(const std::string& s) {
  if (plain_identifier(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

VarIndex lookup(const std::vector<std::string>& names, const std::string& name,
                const std::string& context) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw Error(ErrorKind::validation, context + ": unknown variable '" + name + "'");
  return static_cast<VarIndex>(it - names.begin());
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Minimal DOT tokenizer: identifiers, quoted strings, "->", and punctuation.
struct DotToken {
  enum Kind { id, arrow, punct } kind;
  std::string text;
  std::size_t line;
};

std::vector<DotToken> tokenize_dot(const std::string& text) {
  std::vector<DotToken> out;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      out.push_back({DotToken::arrow, "->", line});
      i += 2;
    } else if (c == '"') {
      std::string s;
      ++i;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        if (text[i] == '\n') ++line;
        s += text[i++];
      }
      if (i >= text.size()) throw Error(ErrorKind::parse, "DOT: unterminated string");
      ++i;
      out.push_back({DotToken::id, s, line});
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
      std::string s;
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                                 text[i] == '_' || text[i] == '.'))
        s += text[i++];
      out.push_back({DotToken::id, s, line});
    } else {
      out.push_back({DotToken::punct, std::string(1, c), line});
      ++i;
    }
  }
  return out;
}

DagModel parse_dot(const std::string& text, const std::vector<std::string>& names) {
  const auto toks = tokenize_dot(text);
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) -> Error {
    const std::size_t line = i < toks.size() ? toks[i].line : (toks.empty() ? 1 : toks.back().line);
    return Error(ErrorKind::parse, "DOT line " + std::to_string(line) + ": " + msg);
  };
  if (i < toks.size() && toks[i].kind == DotToken::id && toks[i].text == "strict") ++i;
  if (i >= toks.size() || toks[i].kind != DotToken::id || toks[i].text != "digraph")
    throw fail("expected 'digraph'");
  ++i;
  if (i < toks.size() && toks[i].kind == DotToken::id) ++i;  // graph name
  if (i >= toks.size() || toks[i].text != "{") throw fail("expected '{'");
  ++i;

  std::vector<std::vector<VarIndex>> parents(names.size());
  auto skip_attributes = [&] {
    if (i < toks.size() && toks[i].text == "[") {
      while (i < toks.size() && toks[i].text != "]") ++i;
      if (i >= toks.size()) throw fail("unterminated attribute list");
      ++i;
    }
  };
  while (i < toks.size() && toks[i].text != "}") {
    if (toks[i].text == ";") {
      ++i;
      continue;
    }
    if (toks[i].kind != DotToken::id) throw fail("unexpected '" + toks[i].text + "'");
    // Graph-level attribute statements are ignored.
    if (toks[i].text == "graph" || toks[i].text == "node" || toks[i].text == "edge") {
      ++i;
      skip_attributes();
      continue;
    }
    if (i + 1 < toks.size() && toks[i + 1].text == "=") {
      i += 3;
      continue;
    }
    std::vector<VarIndex> chain{lookup(names, toks[i].text, "DOT line " + std::to_string(toks[i].line))};
    ++i;
    while (i < toks.size() && toks[i].kind == DotToken::arrow) {
      ++i;
      if (i >= toks.size() || toks[i].kind != DotToken::id) throw fail("expected node after '->'");
      chain.push_back(lookup(names, toks[i].text, "DOT line " + std::to_string(toks[i].line)));
      ++i;
    }
    skip_attributes();
    for (std::size_t k = 1; k < chain.size(); ++k) {
      auto& ps = parents[chain[k]];
      if (std::find(ps.begin(), ps.end(), chain[k - 1]) == ps.end()) ps.push_back(chain[k - 1]);
    }
  }
  if (i >= toks.size()) throw fail("expected '}'");
  return DagModel(std::move(parents));
}

PairwiseLoss parse_pair(const Json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("l0") || !j.contains("l1"))
    throw Error(ErrorKind::validation, context + ": expected {\"l0\":x,\"l1\":y}");
  PairwiseLoss pl{j.at("l0").get<double>(), j.at("l1").get<double>()};
  validate(pl);
  return pl;
}

}  // namespace

std::vector<std::string> variable_names(const CategoricalDataset& data) {
  std::vector<std::string> out;
  for (const auto& v : data.variables()) out.push_back(v.name);
  return out;
}

std::string to_dot(const DagModel& dag, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "digraph G {\n";
  for (const auto& name : names) out << "  " << dot_id(name) << ";\n";
  for (VarIndex v = 0; v < dag.num_variables(); ++v)
    for (VarIndex p : dag.parents(v)) out << "  " << dot_id(names[p]) << " -> " << dot_id(names[v]) << ";\n";
  out << "}\n";
  return out.str();
}

Json dag_to_json(const DagModel& dag, const std::vector<std::string>& names) {
  Json j = Json::object();
  for (VarIndex v = 0; v < dag.num_variables(); ++v) {
    Json ps = Json::array();
    for (VarIndex p : dag.parents(v)) ps.push_back(names[p]);
    j[names[v]] = ps;
  }
  return j;
}

DagModel parse_dag(const std::string& text, const std::vector<std::string>& names) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') {
    Json j;
    try {
      j = Json::parse(t);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::parse, std::string("DAG JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::parse, "DAG JSON must be an object");
    std::vector<std::vector<VarIndex>> parents(names.size());
    for (const auto& [child, ps] : j.items()) {
      const VarIndex c = lookup(names, child, "DAG JSON");
      if (!ps.is_array()) throw Error(ErrorKind::parse, "DAG JSON: parents of '" + child + "' must be a list");
      for (const auto& p : ps) parents[c].push_back(lookup(names, p.get<std::string>(), "DAG JSON"));
    }
    return DagModel(std::move(parents));
  }
  return parse_dot(text, names);
}

DagModel load_dag_file(const std::string& path, const std::vector<std::string>& names) {
  try {
    auto dag = parse_dag(read_text_file(path), names);
    if (!dag.is_acyclic()) throw Error(ErrorKind::validation, "graph has a cycle");
    return dag;
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

VariableOrdering parse_ordering(const std::string& line, const std::vector<std::string>& names) {
  std::vector<VarIndex> order;
  std::istringstream ss(trim(line));
  std::string name;
  while (std::getline(ss, name, ',')) order.push_back(lookup(names, trim(name), "ordering"));
  if (order.size() != names.size())
    throw Error(ErrorKind::validation, "ordering must list every variable exactly once");
  return VariableOrdering(std::move(order));
}

LossSpec parse_loss_spec(const Json& j, const CategoricalDataset& data,
                         const std::vector<CandidateParents>& families) {
  if (!j.is_object() || !j.contains("type"))
    throw Error(ErrorKind::validation, "loss spec: missing \"type\"");
  const auto names = variable_names(data);
  const auto type = j.at("type").get<std::string>();
  if (type == "zero-one") return LossSpec::zero_one();

  if (type == "disintegrable") {
    PairwiseLoss def;
    if (j.contains("default")) def = parse_pair(j.at("default"), "loss spec default");
    auto spec = LossSpec::disintegrable(def);
    if (j.contains("arcs")) {
      for (const auto& [key, val] : j.at("arcs").items()) {
        const auto colon = key.find(':');
        if (colon == std::string::npos)
          throw Error(ErrorKind::validation, "loss spec: arc key '" + key + "' is not child:parent");
        const VarIndex child = lookup(names, key.substr(0, colon), "loss spec");
        const VarIndex parent = lookup(names, key.substr(colon + 1), "loss spec");
        spec.arc_overrides[{child, parent}] = parse_pair(val, "loss spec arc " + key);
      }
    }
    return spec;
  }

  if (type == "state-count") {
    LossSpec spec;
    spec.kind = LossSpec::Kind::state_count;
    spec.h = j.at("h").get<double>();
    spec.k = j.at("k").get<double>();
    if (!(spec.h > 0.0) || !(spec.k > 0.0))
      throw Error(ErrorKind::validation, "loss spec: h and k must be positive");
    return spec;
  }

  if (type == "table") {
    if (!j.contains("child"))
      throw Error(ErrorKind::validation, "loss spec: table needs a \"child\"");
    const VarIndex child = lookup(names, j.at("child").get<std::string>(), "loss spec");
    const auto& fam = families.at(child);
    if (fam.q() > kMaxTableParents)
      throw Error(ErrorKind::capacity, "loss spec: table lattice too large");
    const auto lattice = enumerate_lattice(fam.q(), kMaxTableParents);
    const auto pos = lattice_positions(fam.q());
    const auto& states = j.at("states");
    const auto& rows = j.at("entries");
    const std::size_t n = lattice.size();
    if (states.size() != n || rows.size() != n)
      throw Error(ErrorKind::dimension, "loss spec: table for '" + names[child] + "' needs " +
                                            std::to_string(n) + " states");
    std::vector<std::size_t> where(n);
    std::vector<bool> used(n, false);
    for (std::size_t s = 0; s < n; ++s) {
      SubsetMask mask = 0;
      for (const auto& p : states[s]) {
        const VarIndex pv = lookup(names, p.get<std::string>(), "loss spec state");
        auto it = std::find(fam.candidates.begin(), fam.candidates.end(), pv);
        if (it == fam.candidates.end())
          throw Error(ErrorKind::validation, "loss spec: '" + names[pv] +
                                                 "' is not a candidate parent of '" + names[child] + "'");
        mask |= SubsetMask{1} << (it - fam.candidates.begin());
      }
      where[s] = pos[mask];
      if (used[where[s]]) throw Error(ErrorKind::validation, "loss spec: repeated table state");
      used[where[s]] = true;
    }
    std::vector<double> e(n * n);
    for (std::size_t s = 0; s < n; ++s) {
      if (rows[s].size() != n) throw Error(ErrorKind::dimension, "loss spec: table must be square");
      for (std::size_t t = 0; t < n; ++t) e[where[s] * n + where[t]] = rows[s][t].get<double>();
    }
    std::vector<ArcId> ids(fam.q());
    for (std::size_t b = 0; b < ids.size(); ++b) ids[b] = static_cast<ArcId>(b);
    LossSpec spec;
    spec.kind = LossSpec::Kind::table;
    spec.tables.emplace(child, LossTable(std::move(ids), std::move(e)));
    return spec;
  }
  throw Error(ErrorKind::validation, "loss spec: unknown type '" + type + "'");
}

BayesNetwork parse_network(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::parse, "CPT file must be a JSON object");
  BayesNetwork net;
  std::vector<std::string> names;
  for (const auto& [name, _] : j.items()) names.push_back(name);

  std::vector<std::vector<VarIndex>> parents(names.size());
  for (std::size_t v = 0; v < names.size(); ++v) {
    const auto& entry = j.at(names[v]);
    if (!entry.contains("table"))
      throw Error(ErrorKind::validation, "CPT of '" + names[v] + "' has no table");
    VariableSpec spec;
    spec.name = names[v];
    const auto& table = entry.at("table");
    if (table.empty()) throw Error(ErrorKind::validation, "CPT of '" + names[v] + "' is empty");
    if (entry.contains("states")) {
      for (const auto& s : entry.at("states")) spec.labels.push_back(s.get<std::string>());
    } else {
      for (std::size_t k = 0; k < table[0].size(); ++k) spec.labels.push_back(std::to_string(k));
    }
    net.variables.push_back(spec);
    if (entry.contains("parents"))
      for (const auto& p : entry.at("parents"))
        parents[v].push_back(lookup(names, p.get<std::string>(), "CPT of '" + names[v] + "'"));
    ConditionalTable cpt;
    for (const auto& row : table) cpt.rows.push_back(row.get<std::vector<double>>());
    net.cpts.push_back(std::move(cpt));
  }
  net.dag = DagModel(std::move(parents));
  validate(net);
  return net;
}

Json network_to_json(const BayesNetwork& net) {
  Json j = Json::object();
  for (VarIndex v = 0; v < net.variables.size(); ++v) {
    Json e;
    Json ps = Json::array();
    for (VarIndex p : net.dag.parents(v)) ps.push_back(net.variables[p].name);
    e["parents"] = ps;
    e["states"] = net.variables[v].labels;
    e["table"] = net.cpts[v].rows;
    j[net.variables[v].name] = e;
  }
  return j;
}

Json posterior_to_json(const LocalPosterior& lp, const std::vector<std::string>& names) {
  Json j;
  j["child"] = names[lp.family.child];
  Json cands = Json::array();
  for (VarIndex c : lp.family.candidates) cands.push_back(names[c]);
  j["candidates"] = cands;
  Json subsets = Json::array();
  for (std::size_t i = 0; i < lp.size(); ++i) {
    Json s;
    Json ps = Json::array();
    for (VarIndex p : mask_to_parents(lp.subsets[i], lp.family.candidates)) ps.push_back(names[p]);
    s["parents"] = ps;
    s["log_score"] = lp.log_scores[i];
    s["prob"] = lp.probs[i];
    subsets.push_back(s);
  }
  j["subsets"] = subsets;
  Json arcs = Json::array();
  for (std::size_t pos = 0; pos < lp.q(); ++pos)
    arcs.push_back({{"parent", names[lp.family.candidates[pos]]}, {"P", arc_probability(lp, pos)}});
  j["arc_probabilities"] = arcs;
  return j;
}

Json risk_report_to_json(const RiskReport& r) {
  Json j;
  j["risks"] = r.risks;
  j["bayes_action"] = r.bayes_action;
  j["bayes_risk"] = r.bayes_risk;
  j["ties"] = r.ties;
  return j;
}

Json selection_to_json(const LocalSelection& sel, const std::vector<std::string>& names) {
  Json j;
  j["child"] = names[sel.model.family.child];
  j["q"] = sel.model.family.q();
  j["lattice_size"] = sel.lattice_size;
  j["path"] = to_string(sel.path);
  Json arcs = Json::array();
  for (const auto& a : sel.arcs) {
    Json e;
    e["parent"] = names[a.parent];
    e["P"] = a.probability;
    if (sel.path == SelectionPath::linear_rule)
      e["delta"] = a.delta;
    else
      e["delta"] = nullptr;
    e["decision"] = to_string(a.decision);
    arcs.push_back(e);
  }
  j["arcs"] = arcs;
  j["local_bayes_risk"] = sel.bayes_risk;
  return j;
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse, path + ": " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dtsel
