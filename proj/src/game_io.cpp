#include "smg/game_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace smg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw SpecParseError(where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) ok = true;
    if (!ok) fail(where, "unknown key \"" + it.key() + "\"");
  }
}

const json& field(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing key \"") + key + "\"");
  return *it;
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::vector<std::string> labels_at(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of labels");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) fail(where, "labels must be strings");
    out.push_back(e.get<std::string>());
  }
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = a + 1; b < out.size(); ++b)
      if (out[a] == out[b]) fail(where, "duplicate label \"" + out[a] + "\"");
  return out;
}

int resolve(const std::vector<std::string>& labels, const json& j,
            const std::string& where) {
  if (!j.is_string()) fail(where, "expected a label string");
  const std::string s = j.get<std::string>();
  for (std::size_t n = 0; n < labels.size(); ++n)
    if (labels[n] == s) return static_cast<int>(n);
  fail(where, "unresolved label \"" + s + "\"");
}

SojournLaw parse_sojourn(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const json& kind_j = field(j, where, "kind");
  if (!kind_j.is_string()) fail(where, "kind must be a string");
  const std::string kind = kind_j.get<std::string>();
  if (kind == "exponential") {
    reject_unknown(j, where, {"kind", "rate"});
    return Exponential{number_at(field(j, where, "rate"), where + ".rate")};
  }
  if (kind == "deterministic") {
    reject_unknown(j, where, {"kind", "delay"});
    return Deterministic{number_at(field(j, where, "delay"), where + ".delay")};
  }
  if (kind == "uniform") {
    reject_unknown(j, where, {"kind", "lo", "hi"});
    return Uniform{number_at(field(j, where, "lo"), where + ".lo"),
                   number_at(field(j, where, "hi"), where + ".hi")};
  }
  if (kind == "discrete") {
    reject_unknown(j, where, {"kind", "times", "weights"});
    const json& times = field(j, where, "times");
    const json& weights = field(j, where, "weights");
    if (!times.is_array() || !weights.is_array() ||
        times.size() != weights.size())
      fail(where, "times and weights must be arrays of equal length");
    Discrete d;
    for (std::size_t n = 0; n < times.size(); ++n)
      d.atoms.push_back({number_at(times[n], where + ".times"),
                         number_at(weights[n], where + ".weights")});
    return d;
  }
  fail(where, "unknown sojourn kind \"" + kind + "\"");
}

}  // namespace

GameSpec parse_game_spec(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) throw SpecParseError("spec: not valid JSON");
  if (!root.is_object()) throw SpecParseError("spec: top level must be an object");
  reject_unknown(root, "spec",
                 {"types", "states", "actions_p1", "actions_p2", "alpha",
                  "initial_belief", "cost", "transitions"});

  GameSpec spec;
  spec.types = labels_at(field(root, "spec", "types"), "types");
  spec.states = labels_at(field(root, "spec", "states"), "states");
  spec.actions_p1 = labels_at(field(root, "spec", "actions_p1"), "actions_p1");
  spec.actions_p2 = labels_at(field(root, "spec", "actions_p2"), "actions_p2");
  spec.alpha = number_at(field(root, "spec", "alpha"), "alpha");

  const json& belief = field(root, "spec", "initial_belief");
  if (!belief.is_array()) fail("initial_belief", "expected an array");
  for (const auto& e : belief)
    spec.initial_belief.push_back(number_at(e, "initial_belief"));

  const json& cost = field(root, "spec", "cost");
  if (!cost.is_array() || cost.size() != spec.types.size())
    fail("cost", "expected one array per type");
  for (int k = 0; k < spec.num_types(); ++k) {
    const json& by_state = cost[k];
    const std::string wk = "cost[" + spec.types[k] + "]";
    if (!by_state.is_array() || by_state.size() != spec.states.size())
      fail(wk, "expected one array per state");
    for (int i = 0; i < spec.num_states(); ++i) {
      const json& by_a = by_state[i];
      const std::string wi = wk + "[" + spec.states[i] + "]";
      if (!by_a.is_array() || by_a.size() != spec.actions_p1.size())
        fail(wi, "expected one array per actions_p1 entry");
      for (int a = 0; a < spec.num_a1(); ++a) {
        const json& by_b = by_a[a];
        const std::string wa = wi + "[" + spec.actions_p1[a] + "]";
        if (!by_b.is_array() || by_b.size() != spec.actions_p2.size())
          fail(wa, "expected one number per actions_p2 entry");
        for (int b = 0; b < spec.num_a2(); ++b)
          spec.cost.push_back(number_at(by_b[b], wa));
      }
    }
  }

  const json& trans = field(root, "spec", "transitions");
  if (!trans.is_array()) fail("transitions", "expected an array of records");
  spec.transitions.resize(static_cast<std::size_t>(spec.num_states()) *
                          spec.num_a1() * spec.num_a2());
  std::vector<bool> seen(spec.transitions.size(), false);
  for (std::size_t n = 0; n < trans.size(); ++n) {
    const json& rec = trans[n];
    const std::string wr = "transitions[" + std::to_string(n) + "]";
    if (!rec.is_object()) fail(wr, "expected an object");
    reject_unknown(rec, wr, {"from", "a1", "a2", "branches"});
    int i = resolve(spec.states, field(rec, wr, "from"), wr + ".from");
    int a = resolve(spec.actions_p1, field(rec, wr, "a1"), wr + ".a1");
    int b = resolve(spec.actions_p2, field(rec, wr, "a2"), wr + ".a2");
    int iab = spec.iab_index(i, a, b);
    if (seen[iab]) fail(wr, "duplicate record for this (from, a1, a2)");
    seen[iab] = true;
    const json& branches = field(rec, wr, "branches");
    if (!branches.is_array()) fail(wr + ".branches", "expected an array");
    for (std::size_t bn = 0; bn < branches.size(); ++bn) {
      const json& br = branches[bn];
      const std::string wb = wr + ".branches[" + std::to_string(bn) + "]";
      if (!br.is_object()) fail(wb, "expected an object");
      reject_unknown(br, wb, {"to", "prob", "sojourn"});
      Branch out;
      out.to = resolve(spec.states, field(br, wb, "to"), wb + ".to");
      out.prob = number_at(field(br, wb, "prob"), wb + ".prob");
      out.law = parse_sojourn(field(br, wb, "sojourn"), wb + ".sojourn");
      spec.transitions[iab].push_back(out);
    }
  }
  for (int i = 0; i < spec.num_states(); ++i)
    for (int a = 0; a < spec.num_a1(); ++a)
      for (int b = 0; b < spec.num_a2(); ++b)
        if (!seen[spec.iab_index(i, a, b)])
          fail("transitions", "no record for (" + spec.states[i] + "," +
                                  spec.actions_p1[a] + "," +
                                  spec.actions_p2[b] + ")");
  return spec;
}

GameSpec load_game_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_game_spec(buf.str());
}

namespace {

json sojourn_to_json(const SojournLaw& law) {
  json j;
  j["kind"] = law_kind(law);
  if (const auto* e = std::get_if<Exponential>(&law)) {
    j["rate"] = e->rate;
  } else if (const auto* d = std::get_if<Deterministic>(&law)) {
    j["delay"] = d->delay;
  } else if (const auto* u = std::get_if<Uniform>(&law)) {
    j["lo"] = u->lo;
    j["hi"] = u->hi;
  } else if (const auto* disc = std::get_if<Discrete>(&law)) {
    json times = json::array(), weights = json::array();
    for (const auto& a : disc->atoms) {
      times.push_back(a.t);
      weights.push_back(a.weight);
    }
    j["times"] = times;
    j["weights"] = weights;
  }
  return j;
}

}  // namespace

std::string game_spec_to_json(const GameSpec& spec) {
  json root;
  root["types"] = spec.types;
  root["states"] = spec.states;
  root["actions_p1"] = spec.actions_p1;
  root["actions_p2"] = spec.actions_p2;
  root["alpha"] = spec.alpha;
  root["initial_belief"] = spec.initial_belief;
  json cost = json::array();
  for (int k = 0; k < spec.num_types(); ++k) {
    json by_state = json::array();
    for (int i = 0; i < spec.num_states(); ++i) {
      json by_a = json::array();
      for (int a = 0; a < spec.num_a1(); ++a) {
        json by_b = json::array();
        for (int b = 0; b < spec.num_a2(); ++b)
          by_b.push_back(spec.cost_at(k, i, a, b));
        by_a.push_back(by_b);
      }
      by_state.push_back(by_a);
    }
    cost.push_back(by_state);
  }
  root["cost"] = cost;
  json trans = json::array();
  for (int i = 0; i < spec.num_states(); ++i)
    for (int a = 0; a < spec.num_a1(); ++a)
      for (int b = 0; b < spec.num_a2(); ++b) {
        json rec;
        rec["from"] = spec.states[i];
        rec["a1"] = spec.actions_p1[a];
        rec["a2"] = spec.actions_p2[b];
        json branches = json::array();
        for (const auto& br : spec.transitions[spec.iab_index(i, a, b)]) {
          json bj;
          bj["to"] = spec.states[br.to];
          bj["prob"] = br.prob;
          bj["sojourn"] = sojourn_to_json(br.law);
          branches.push_back(bj);
        }
        rec["branches"] = branches;
        trans.push_back(rec);
      }
  root["transitions"] = trans;
  return root.dump(2);
}

std::string spec_digest(const GameSpec& spec) {
  const std::string canon = game_spec_to_json(spec);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace smg
