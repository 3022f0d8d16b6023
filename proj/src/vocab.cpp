#include "jdst/vocab.hpp"

#include <json.hpp>

#include <set>
#include <stdexcept>

namespace jdst {

using nlohmann::json;

Vocab Vocab::build(const Corpus& train, int min_token_freq) {
  if (train.empty()) throw std::invalid_argument("build_vocab: empty corpus");
  std::map<std::string, int> freq;
  std::set<std::string> intents, user_acts, system_acts, slots;
  for (const Dialogue& d : train) {
    for (const Turn& t : d.turns) {
      for (size_t m = 1; m + 1 < t.tokens.size(); ++m) ++freq[t.tokens[m]];
      if (!t.intent.empty()) intents.insert(t.intent);
      for (const std::string& a : t.user_acts) user_acts.insert(a);
      for (const SystemAct& a : t.system_acts) {
        system_acts.insert(a.type);
        if (!a.slot.empty()) slots.insert(a.slot);
      }
      for (const SlotSpan& sp : t.spans) slots.insert(sp.slot);
      for (const auto& [slot, value] : t.state) slots.insert(slot);
    }
  }
  Vocab v;
  v.min_token_freq = min_token_freq;
  v.tokens = {kPadToken, kUnkToken, kSosToken, kEosToken};
  for (const auto& [tok, n] : freq)
    if (n >= min_token_freq) v.tokens.push_back(tok);
  v.intents.assign(intents.begin(), intents.end());
  v.user_acts.assign(user_acts.begin(), user_acts.end());
  v.system_acts.assign(system_acts.begin(), system_acts.end());
  v.slots.assign(slots.begin(), slots.end());
  return v;
}

int Vocab::token_id(const std::string& tok) const {
  if (token_cache_.empty())
    for (size_t i = 0; i < tokens.size(); ++i) token_cache_[tokens[i]] = static_cast<int>(i);
  auto it = token_cache_.find(tok);
  return it == token_cache_.end() ? unk_id() : it->second;
}

std::vector<int> Vocab::token_ids(const std::vector<std::string>& toks) const {
  std::vector<int> out;
  out.reserve(toks.size());
  for (const std::string& t : toks) out.push_back(token_id(t));
  return out;
}

int Vocab::index_of(const std::vector<std::string>& v, const std::string& s) {
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i] == s) return static_cast<int>(i);
  return -1;
}

std::string Vocab::to_json() const {
  json j;
  j["tokens"] = tokens;
  j["intents"] = intents;
  j["user_acts"] = user_acts;
  j["system_acts"] = system_acts;
  j["slots"] = slots;
  j["min_token_freq"] = min_token_freq;
  return j.dump();
}

Vocab Vocab::from_json(const std::string& text) {
  json j = json::parse(text);
  Vocab v;
  v.tokens = j.at("tokens").get<std::vector<std::string>>();
  v.intents = j.at("intents").get<std::vector<std::string>>();
  v.user_acts = j.at("user_acts").get<std::vector<std::string>>();
  v.system_acts = j.at("system_acts").get<std::vector<std::string>>();
  v.slots = j.at("slots").get<std::vector<std::string>>();
  v.min_token_freq = j.at("min_token_freq").get<int>();
  return v;
}

uint64_t Vocab::hash() const { return fnv1a(to_json()); }

}  // namespace jdst
