#include "jdst/data.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace jdst {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw std::runtime_error(where + ": " + what);
}

std::string get_string(const json& j, const char* field, const std::string& where) {
  if (!j.contains(field)) bad(where, std::string("missing field '") + field + "'");
  if (!j.at(field).is_string()) bad(where, std::string("field '") + field + "' must be a string");
  return j.at(field).get<std::string>();
}

// True when the record uses the published Simulated Dialogues layout rather
// than the canonical one.
bool looks_published(const json& turn) {
  if (turn.contains("user_intents")) return true;
  if (turn.contains("user_utterance") && turn.at("user_utterance").is_object() &&
      turn.at("user_utterance").contains("slots"))
    return true;
  return false;
}

SystemAct parse_system_act(const json& j, const std::string& where) {
  SystemAct act;
  act.type = lowercase(get_string(j, "type", where));
  if (j.contains("slot") && !j.at("slot").is_null())
    act.slot = lowercase(j.at("slot").get<std::string>());
  if (j.contains("value") && !j.at("value").is_null())
    act.value = lowercase(j.at("value").get<std::string>());
  if (!act.value.empty() && act.slot.empty())
    bad(where, "system act '" + act.type + "' has a value without a slot");
  return act;
}

Turn parse_turn(const json& j, const std::string& where) {
  const bool published = looks_published(j);
  Turn turn;

  if (j.contains("system_acts")) {
    size_t k = 0;
    for (const json& a : j.at("system_acts"))
      turn.system_acts.push_back(
          parse_system_act(a, where + " system_acts[" + std::to_string(k++) + "]"));
  }

  if (!j.contains("user_utterance")) bad(where, "missing field 'user_utterance'");
  const json& uu = j.at("user_utterance");
  if (!uu.contains("tokens") || !uu.at("tokens").is_array())
    bad(where, "user_utterance missing 'tokens' array");
  turn.tokens.push_back(kSosToken);
  for (const json& t : uu.at("tokens")) turn.tokens.push_back(lowercase(t.get<std::string>()));
  turn.tokens.push_back(kEosToken);

  const char* span_field = published ? "slots" : "spans";
  if (uu.contains(span_field)) {
    size_t k = 0;
    for (const json& s : uu.at(span_field)) {
      std::string sw = where + " " + span_field + "[" + std::to_string(k++) + "]";
      SlotSpan span;
      span.slot = lowercase(get_string(s, "slot", sw));
      if (!s.contains("start") || !s.contains("exclusive_end"))
        bad(sw, "span needs 'start' and 'exclusive_end'");
      span.start = s.at("start").get<int>() + 1;  // shift for <sos>
      span.end = s.at("exclusive_end").get<int>() + 1;
      turn.spans.push_back(span);
    }
  }

  if (published) {
    if (j.contains("user_intents") && !j.at("user_intents").empty())
      turn.intent = lowercase(j.at("user_intents").at(0).get<std::string>());
  } else if (j.contains("intent") && !j.at("intent").is_null()) {
    turn.intent = lowercase(j.at("intent").get<std::string>());
  }

  if (j.contains("user_acts")) {
    std::set<std::string> acts;
    for (const json& a : j.at("user_acts")) {
      if (a.is_string()) acts.insert(lowercase(a.get<std::string>()));
      else acts.insert(lowercase(get_string(a, "type", where + " user_acts")));
    }
    turn.user_acts.assign(acts.begin(), acts.end());
  }

  if (j.contains("dialogue_state")) {
    size_t k = 0;
    for (const json& s : j.at("dialogue_state")) {
      std::string sw = where + " dialogue_state[" + std::to_string(k++) + "]";
      turn.state[lowercase(get_string(s, "slot", sw))] = lowercase(get_string(s, "value", sw));
    }
  }

  validate_turn(turn, where);
  return turn;
}

}  // namespace

void validate_turn(const Turn& turn, const std::string& where) {
  const int m = static_cast<int>(turn.tokens.size());
  if (m < 2) bad(where, "utterance must contain at least SOS and EOS");
  std::vector<SlotSpan> sorted = turn.spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const SlotSpan& a, const SlotSpan& b) { return a.start < b.start; });
  int prev_end = 0;
  for (const SlotSpan& sp : sorted) {
    if (sp.start < 1 || sp.end > m - 1 || sp.start >= sp.end)
      bad(where, "field 'spans': span [" + std::to_string(sp.start - 1) + "," +
                     std::to_string(sp.end - 1) + ") out of range for " + std::to_string(m - 2) +
                     " tokens");
    if (sp.start < prev_end) bad(where, "field 'spans': overlapping spans");
    prev_end = sp.end;
  }
  for (const SystemAct& a : turn.system_acts)
    if (!a.value.empty() && a.slot.empty())
      bad(where, "field 'system_acts': value without slot");
}

Corpus parse_corpus(const std::string& json_text, const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(origin + ": JSON parse error: " + e.what());
  }
  if (!root.is_array()) throw std::runtime_error(origin + ": expected a top-level array");
  Corpus corpus;
  for (const json& jd : root) {
    Dialogue d;
    d.id = jd.contains("dialogue_id") ? jd.at("dialogue_id").get<std::string>()
                                      : "dialogue-" + std::to_string(corpus.size());
    if (!jd.contains("turns") || !jd.at("turns").is_array() || jd.at("turns").empty())
      bad("dialogue '" + d.id + "'", "missing or empty field 'turns'");
    size_t t = 0;
    for (const json& jt : jd.at("turns"))
      d.turns.push_back(parse_turn(jt, "dialogue '" + d.id + "' turn " + std::to_string(t++)));
    corpus.push_back(std::move(d));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_corpus: cannot open " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  std::string text = buf.str();
  if (strip(text).empty() || strip(text) == "[]") {
    std::cerr << "warning: corpus file " << path << " is empty\n";
    return {};
  }
  Corpus corpus = parse_corpus(text, path);
  CorpusCounts c = count_corpus(corpus);
  std::cerr << "loaded " << path << ": " << c.dialogues << " dialogues, " << c.turns
            << " turns, " << c.slots << " slots\n";
  return corpus;
}

std::string corpus_to_json(const Corpus& corpus) {
  ordered_json root = ordered_json::array();
  for (const Dialogue& d : corpus) {
    ordered_json jd;
    jd["dialogue_id"] = d.id;
    jd["turns"] = ordered_json::array();
    for (const Turn& t : d.turns) {
      ordered_json jt;
      jt["system_acts"] = ordered_json::array();
      for (const SystemAct& a : t.system_acts) {
        ordered_json ja;
        ja["type"] = a.type;
        if (!a.slot.empty()) ja["slot"] = a.slot;
        if (!a.value.empty()) ja["value"] = a.value;
        jt["system_acts"].push_back(ja);
      }
      ordered_json uu;
      uu["tokens"] =
          std::vector<std::string>(t.tokens.begin() + 1, t.tokens.end() - 1);
      uu["spans"] = ordered_json::array();
      for (const SlotSpan& sp : t.spans) {
        ordered_json js;
        js["slot"] = sp.slot;
        js["start"] = sp.start - 1;
        js["exclusive_end"] = sp.end - 1;
        uu["spans"].push_back(js);
      }
      jt["user_utterance"] = uu;
      jt["intent"] = t.intent;
      jt["user_acts"] = t.user_acts;
      jt["dialogue_state"] = ordered_json::array();
      for (const auto& [slot, value] : t.state) {
        ordered_json js;
        js["slot"] = slot;
        js["value"] = value;
        jt["dialogue_state"].push_back(js);
      }
      jd["turns"].push_back(jt);
    }
    root.push_back(jd);
  }
  return root.dump(1);
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("save_corpus: cannot open " + path);
  os << corpus_to_json(corpus) << "\n";
}

CorpusCounts count_corpus(const Corpus& corpus) {
  CorpusCounts c;
  std::set<std::string> slots;
  c.dialogues = corpus.size();
  for (const Dialogue& d : corpus) {
    c.turns += d.turns.size();
    for (const Turn& t : d.turns) {
      for (const SlotSpan& sp : t.spans) slots.insert(sp.slot);
      for (const auto& [slot, value] : t.state) slots.insert(slot);
      for (const SystemAct& a : t.system_acts)
        if (!a.slot.empty()) slots.insert(a.slot);
    }
  }
  c.slots = slots.size();
  return c;
}

Corpus merge_corpora(const std::vector<Corpus>& parts) {
  Corpus out;
  for (const Corpus& c : parts) out.insert(out.end(), c.begin(), c.end());
  return out;
}

std::vector<std::string> apply_slot_value_dropout(const std::vector<std::string>& tokens,
                                                  const std::vector<SlotSpan>& spans, double p,
                                                  Rng& rng) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("apply_slot_value_dropout: p must be in [0,1]");
  std::vector<std::string> out = tokens;
  for (const SlotSpan& sp : spans)
    for (int m = sp.start; m < sp.end; ++m)
      if (rng.bernoulli(p)) out[m] = kUnkToken;
  return out;
}

}  // namespace jdst
