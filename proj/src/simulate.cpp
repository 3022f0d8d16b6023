#include "jdst/simulate.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace jdst {

namespace {

struct Draft {
  std::vector<std::string> tokens;  // raw, no SOS/EOS yet
  std::vector<SlotSpan> spans;      // raw indices
  std::set<std::string> acts;
};

void add_text(Draft& d, const std::string& words) {
  for (const std::string& w : split_ws(words)) d.tokens.push_back(w);
}

void add_value(Draft& d, const std::string& slot, const std::string& value) {
  SlotSpan sp;
  sp.slot = slot;
  sp.start = static_cast<int>(d.tokens.size());
  add_text(d, value);
  sp.end = static_cast<int>(d.tokens.size());
  d.spans.push_back(sp);
}

Turn finish(Draft& d, std::vector<SystemAct> sys, const std::string& intent,
            const std::map<std::string, std::string>& state) {
  Turn t;
  t.system_acts = std::move(sys);
  t.tokens.push_back(kSosToken);
  t.tokens.insert(t.tokens.end(), d.tokens.begin(), d.tokens.end());
  t.tokens.push_back(kEosToken);
  for (SlotSpan sp : d.spans) {
    sp.start += 1;
    sp.end += 1;
    t.spans.push_back(sp);
  }
  t.intent = intent;
  t.user_acts.assign(d.acts.begin(), d.acts.end());
  t.state = state;
  return t;
}

std::vector<std::string> make_names(Rng& rng, const std::vector<std::string>& first,
                                    const std::vector<std::string>& second, size_t n,
                                    bool allow_the) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string name = rng.pick(first) + " " + rng.pick(second);
    if (allow_the && rng.bernoulli(0.3)) name = "the " + name;
    if (seen.insert(name).second) out.push_back(name);
  }
  return out;
}

const std::vector<std::string> kLocations = {"mountain view", "palo alto",  "sunnyvale",
                                             "san jose",      "los altos",  "cupertino",
                                             "santa clara",   "menlo park"};
const std::vector<std::string> kDates = {"today",     "tomorrow",  "monday",   "tuesday",
                                         "wednesday", "thursday",  "friday",   "saturday",
                                         "sunday",    "next monday", "next friday",
                                         "march 3",   "march 5",   "april 12"};
const std::vector<std::string> kTimes = {"5 pm",    "6 pm", "6.30 pm", "7 pm",
                                         "7.30 pm", "8 pm", "8.30 pm", "9 pm",
                                         "noon",    "1 pm", "11.30 am"};
const std::vector<std::string> kPeople = {"two", "three", "four", "five", "six",
                                          "seven", "eight", "2",   "3",    "4"};
const std::vector<std::string> kCuisines = {"italian",  "mexican", "chinese",
                                            "indian",   "thai",    "greek",
                                            "japanese", "american", "korean"};
const std::vector<std::string> kTheatres = {"century 16",  "amc mercado", "cinemark 12",
                                            "shoreline theater", "aquarius theatre",
                                            "camera 7",    "grand lake",  "vine cinema"};

// generic inform templates; {1}/{2} are value placeholders
const std::vector<std::string> kInformOne = {
    "make it {1}", "{1} please", "i want {1}", "{1} works for me", "lets do {1}",
    "how about {1}", "{1} would be great"};
const std::vector<std::string> kInformTwo = {
    "{1} and {2}", "{1} at {2}", "make it {1} for {2}", "{1} , {2} please",
    "lets say {1} and {2}"};
const std::vector<std::string> kAffirm = {"yes that works", "yes please",
                                          "sounds good , yes", "yes , perfect"};
const std::vector<std::string> kBye = {"thank you , goodbye", "thanks , bye",
                                       "great , thank you , bye"};

// everyday word used to refer to a slot without naming a value
const std::map<std::string, std::string> kSlotWord = {
    {"date", "date"},           {"time", "time"},       {"category", "cuisine"},
    {"location", "area"},       {"num_people", "party size"},
    {"restaurant_name", "restaurant"}, {"movie", "movie"}, {"theatre_name", "theatre"}};

void render_inform(Draft& d, Rng& rng, const std::vector<std::pair<std::string, std::string>>& kv) {
  const std::string& tmpl =
      kv.size() == 1 ? rng.pick(kInformOne) : rng.pick(kInformTwo);
  size_t next = 0;
  for (const std::string& piece : split_ws(tmpl)) {
    if (piece == "{1}" || piece == "{2}") {
      add_value(d, kv[next].first, kv[next].second);
      ++next;
    } else {
      d.tokens.push_back(piece);
    }
  }
  d.acts.insert("inform");
}

struct ValuePools {
  std::vector<std::string> train_names, extra_names;
  double unseen_rate = 0.15;  // probability a dev/test name falls outside training

  std::string draw_name(Rng& rng, bool train_split) const {
    if (train_split || !rng.bernoulli(unseen_rate)) return rng.pick(train_names);
    return rng.pick(extra_names);
  }
};

Dialogue restaurant_dialogue(Rng& rng, const ValuePools& pools, bool train_split,
                             const std::string& id) {
  const std::string intent = "reserve_restaurant";
  std::map<std::string, std::string> goal;
  goal["restaurant_name"] = pools.draw_name(rng, train_split);
  goal["time"] = rng.pick(kTimes);
  goal["date"] = rng.pick(kDates);
  goal["num_people"] = rng.pick(kPeople);
  if (rng.bernoulli(0.5)) goal["location"] = rng.pick(kLocations);
  if (rng.bernoulli(0.35)) goal["category"] = rng.pick(kCuisines);

  std::vector<std::string> pending;
  for (const char* s : {"restaurant_name", "num_people", "date", "time", "location", "category"})
    if (goal.count(s)) pending.push_back(s);

  Dialogue dlg;
  dlg.id = id;
  std::map<std::string, std::string> state;

  // opening: greeting plus one or two informs
  {
    Draft d;
    d.acts.insert("greeting");
    size_t first = rng.bernoulli(0.7) ? 2 : 1;
    first = std::min(first, pending.size());
    add_text(d, rng.bernoulli(0.5) ? "hello ," : "hi ,");
    std::vector<std::pair<std::string, std::string>> kv;
    if (rng.bernoulli(0.6)) {
      add_text(d, "i need a table");
      for (size_t i = 0; i < first; ++i) kv.push_back({pending[i], goal[pending[i]]});
      if (kv.size() == 1) {
        add_text(d, "at");
        add_value(d, kv[0].first, kv[0].second);
        d.acts.insert("inform");
      } else {
        add_text(d, "for");
        render_inform(d, rng, kv);
      }
    } else {
      add_text(d, "book");
      for (size_t i = 0; i < first; ++i) kv.push_back({pending[i], goal[pending[i]]});
      render_inform(d, rng, kv);
    }
    for (auto& [slot, value] : kv) state[slot] = value;
    pending.erase(pending.begin(), pending.begin() + static_cast<long>(first));
    dlg.turns.push_back(finish(d, {{"greeting", "", ""}}, intent, state));
  }

  // request / inform rounds
  while (!pending.empty()) {
    size_t take = std::min<size_t>(pending.size(), rng.bernoulli(0.4) ? 2 : 1);
    std::vector<SystemAct> sys;
    std::vector<std::pair<std::string, std::string>> kv;
    Draft d;
    for (size_t i = 0; i < take; ++i) {
      const std::string slot = pending[i];
      sys.push_back({"request", slot, ""});
      bool dontcare = (slot == "date" || slot == "category" || slot == "location") &&
                      rng.bernoulli(0.12);
      if (dontcare) {
        add_text(d, "any " + kSlotWord.at(slot) + " is fine");
        d.acts.insert("inform");
        state[slot] = kDontcare;
      } else {
        kv.push_back({slot, goal[slot]});
        state[slot] = goal[slot];
      }
    }
    if (!kv.empty()) render_inform(d, rng, kv);
    if (d.tokens.empty()) add_text(d, "anything works");
    pending.erase(pending.begin(), pending.begin() + static_cast<long>(take));
    dlg.turns.push_back(finish(d, std::move(sys), intent, state));
  }

  // optional offer of an alternative time
  if (rng.bernoulli(0.45) && state.count("time") && state["time"] != kDontcare) {
    std::string alt = rng.pick(kTimes);
    while (alt == state["time"]) alt = rng.pick(kTimes);
    std::vector<SystemAct> sys = {{"offer", "time", alt}};
    Draft d;
    if (rng.bernoulli(0.5)) {
      add_text(d, rng.pick(kAffirm));
      d.acts.insert("affirm");
      state["time"] = alt;
    } else {
      std::string replacement = rng.pick(kTimes);
      while (replacement == alt) replacement = rng.pick(kTimes);
      if (rng.bernoulli(0.5)) {
        add_value(d, "time", alt);
        add_text(d, "does not work , how about");
        add_value(d, "time", replacement);
        add_text(d, "?");
      } else {
        add_text(d, "no , lets do");
        add_value(d, "time", replacement);
      }
      d.acts.insert("negate");
      d.acts.insert("inform");
      state["time"] = replacement;
    }
    dlg.turns.push_back(finish(d, std::move(sys), intent, state));
  }

  // confirmation round over one or two filled slots
  if (rng.bernoulli(0.5)) {
    std::vector<std::string> filled;
    for (auto& [slot, value] : state)
      if (value != kDontcare) filled.push_back(slot);
    if (!filled.empty()) {
      const std::string& slot = filled[rng.below(filled.size())];
      std::vector<SystemAct> sys = {{"confirm", slot, state[slot]}};
      Draft d;
      add_text(d, rng.bernoulli(0.5) ? "yes that is right" : "yes , correct");
      d.acts.insert("affirm");
      dlg.turns.push_back(finish(d, std::move(sys), intent, state));
    }
  }

  {
    std::vector<SystemAct> sys = {{"notify_success", "", ""}};
    Draft d;
    add_text(d, rng.pick(kBye));
    d.acts.insert("thank_you");
    d.acts.insert("good_bye");
    dlg.turns.push_back(finish(d, std::move(sys), intent, state));
  }
  return dlg;
}

Dialogue movie_dialogue(Rng& rng, const ValuePools& pools, bool train_split,
                        const std::string& id) {
  const bool buy = rng.bernoulli(0.7);
  const std::string intent = buy ? "buy_movie_tickets" : "find_movies";
  Dialogue dlg;
  dlg.id = id;
  std::map<std::string, std::string> state;

  if (buy) {
    std::map<std::string, std::string> goal;
    goal["movie"] = pools.draw_name(rng, train_split);
    goal["date"] = rng.pick(kDates);
    goal["time"] = rng.pick(kTimes);
    goal["num_people"] = rng.pick(kPeople);
    if (rng.bernoulli(0.45)) goal["theatre_name"] = rng.pick(kTheatres);

    std::vector<std::string> pending;
    for (const char* s : {"movie", "num_people", "date", "time", "theatre_name"})
      if (goal.count(s)) pending.push_back(s);

    {
      Draft d;
      d.acts.insert("greeting");
      d.acts.insert("inform");
      add_text(d, rng.bernoulli(0.5) ? "hi , i want" : "hello , get me");
      add_value(d, "num_people", goal["num_people"]);
      add_text(d, "tickets for");
      add_value(d, "movie", goal["movie"]);
      state["num_people"] = goal["num_people"];
      state["movie"] = goal["movie"];
      pending.erase(std::remove_if(pending.begin(), pending.end(),
                                   [](const std::string& s) {
                                     return s == "movie" || s == "num_people";
                                   }),
                    pending.end());
      dlg.turns.push_back(finish(d, {{"greeting", "", ""}}, intent, state));
    }
    while (!pending.empty()) {
      size_t take = std::min<size_t>(pending.size(), rng.bernoulli(0.4) ? 2 : 1);
      std::vector<SystemAct> sys;
      std::vector<std::pair<std::string, std::string>> kv;
      Draft d;
      for (size_t i = 0; i < take; ++i) {
        const std::string slot = pending[i];
        sys.push_back({"request", slot, ""});
        bool dontcare = slot == "date" && rng.bernoulli(0.1);
        if (dontcare) {
          add_text(d, "any date is fine");
          d.acts.insert("inform");
          state[slot] = kDontcare;
        } else {
          kv.push_back({slot, goal[slot]});
          state[slot] = goal[slot];
        }
      }
      if (!kv.empty()) render_inform(d, rng, kv);
      if (d.tokens.empty()) add_text(d, "anything works");
      pending.erase(pending.begin(), pending.begin() + static_cast<long>(take));
      dlg.turns.push_back(finish(d, std::move(sys), intent, state));
    }
    if (rng.bernoulli(0.35)) {
      std::string alt = rng.pick(kTimes);
      while (alt == state["time"]) alt = rng.pick(kTimes);
      std::vector<SystemAct> sys = {{"offer", "time", alt}};
      Draft d;
      if (rng.bernoulli(0.55)) {
        add_text(d, rng.pick(kAffirm));
        d.acts.insert("affirm");
        state["time"] = alt;
      } else {
        add_text(d, "no , lets do");
        std::string replacement = rng.pick(kTimes);
        while (replacement == alt) replacement = rng.pick(kTimes);
        add_value(d, "time", replacement);
        d.acts.insert("negate");
        d.acts.insert("inform");
        state["time"] = replacement;
      }
      dlg.turns.push_back(finish(d, std::move(sys), intent, state));
    }
  } else {
    // find_movies: the system offers names and the user settles on one
    {
      Draft d;
      d.acts.insert("greeting");
      add_text(d, "hi , what movies are playing");
      if (rng.bernoulli(0.6)) {
        d.acts.insert("inform");
        std::string date = rng.pick(kDates);
        add_value(d, "date", date);
        state["date"] = date;
      }
      add_text(d, "?");
      dlg.turns.push_back(finish(d, {{"greeting", "", ""}}, intent, state));
    }
    std::string offered = pools.draw_name(rng, train_split);
    if (rng.bernoulli(0.3)) {
      std::vector<SystemAct> sys = {{"offer", "movie", offered}};
      Draft d;
      add_text(d, "what else do you have ?");
      d.acts.insert("request_alts");
      dlg.turns.push_back(finish(d, std::move(sys), intent, state));
      offered = pools.draw_name(rng, train_split);
    }
    {
      std::vector<SystemAct> sys = {{"offer", "movie", offered}};
      Draft d;
      d.acts.insert("affirm");
      if (rng.bernoulli(0.5)) {
        add_value(d, "movie", offered);
        add_text(d, "sounds good");
        d.acts.insert("inform");
      } else {
        add_text(d, rng.pick(kAffirm));
      }
      state["movie"] = offered;
      dlg.turns.push_back(finish(d, std::move(sys), intent, state));
    }
  }

  {
    std::vector<SystemAct> sys = {{"notify_success", "", ""}};
    Draft d;
    add_text(d, rng.pick(kBye));
    d.acts.insert("thank_you");
    d.acts.insert("good_bye");
    dlg.turns.push_back(finish(d, std::move(sys), intent, state));
  }
  return dlg;
}

template <typename F>
SimCorpora generate(const SimOptions& opt, const std::string& tag, const ValuePools& pools,
                    F make_dialogue) {
  Rng rng(opt.seed);
  SimCorpora out;
  auto fill = [&](Corpus& corpus, int n, const char* split, bool train_split) {
    for (int i = 0; i < n; ++i) {
      char id[64];
      std::snprintf(id, sizeof(id), "%s-%s-%04d", tag.c_str(), split, i);
      corpus.push_back(make_dialogue(rng, pools, train_split, std::string(id)));
    }
  };
  fill(out.train, opt.n_train, "train", true);
  fill(out.dev, opt.n_dev, "dev", false);
  fill(out.test, opt.n_test, "test", false);
  return out;
}

}  // namespace

SimCorpora generate_restaurant_corpus(const SimOptions& opt) {
  static const std::vector<std::string> adj = {
      "olive", "golden", "blue",  "royal", "little", "casa",  "villa", "amber", "silver",
      "jade",  "lotus",  "sunny", "red",   "ivory",  "coral", "cedar", "maple", "pearl"};
  static const std::vector<std::string> noun = {
      "garden", "palace", "bistro", "kitchen", "house", "grill", "corner",
      "table",  "terrace", "tavern", "room",   "fork",  "oven",  "hearth"};
  Rng name_rng(opt.seed ^ 0xa5a5a5a5ull);
  std::vector<std::string> names = make_names(name_rng, adj, noun, 65, false);
  ValuePools pools;
  pools.train_names.assign(names.begin(), names.begin() + 45);
  pools.extra_names.assign(names.begin() + 45, names.end());
  pools.unseen_rate = 0.15;
  return generate(opt, "sim-r", pools, restaurant_dialogue);
}

SimCorpora generate_movie_corpus(const SimOptions& opt) {
  static const std::vector<std::string> first = {
      "midnight", "silent", "crimson", "golden", "lost",    "hidden",  "iron",
      "paper",    "winter", "summer",  "broken", "electric", "savage", "gentle",
      "distant",  "burning", "frozen", "scarlet", "shadow",  "drifting"};
  static const std::vector<std::string> second = {
      "horizon", "empire",  "voyage",  "letters", "kingdom",  "promise", "echoes",
      "garden",  "station", "harbor",  "sparrow", "canyon",   "circus",  "thief",
      "symphony", "mirage", "crossing", "tides",  "lanterns", "orchard"};
  Rng name_rng(opt.seed ^ 0x5a5a5a5aull);
  std::vector<std::string> names = make_names(name_rng, first, second, 200, true);
  ValuePools pools;
  pools.train_names.assign(names.begin(), names.begin() + 40);
  pools.extra_names.assign(names.begin() + 40, names.end());
  pools.unseen_rate = 0.87;  // roughly 13% of dev/test names occur in training
  return generate(opt, "sim-m", pools, movie_dialogue);
}

Corpus replace_slot_values_with_unseen(const Corpus& corpus, const std::string& slot,
                                       uint64_t seed) {
  static const std::vector<std::string> syllables = {
      "zor", "vex", "qua", "plim", "dru", "fang", "jor", "klep", "mux", "nib",
      "ost", "pry", "quil", "rzo", "skra", "tev", "ulf", "vro", "wex", "yalt"};
  Rng rng(seed);
  std::map<std::string, std::string> mapping;
  auto fresh_value = [&](const std::string& old) -> std::string {
    auto it = mapping.find(old);
    if (it != mapping.end()) return it->second;
    size_t n_tokens = split_ws(old).size();
    std::vector<std::string> parts;
    for (size_t i = 0; i < n_tokens; ++i)
      parts.push_back(rng.pick(syllables) + rng.pick(syllables) +
                      std::to_string(mapping.size()));
    std::string v = join(parts.begin(), parts.end(), " ");
    mapping.emplace(old, v);
    return v;
  };

  Corpus out = corpus;
  for (Dialogue& d : out) {
    for (Turn& t : d.turns) {
      for (SlotSpan& sp : t.spans) {
        if (sp.slot != slot) continue;
        std::string old = join(t.tokens.begin() + sp.start, t.tokens.begin() + sp.end, " ");
        std::vector<std::string> repl = split_ws(fresh_value(old));
        for (int m = sp.start; m < sp.end; ++m)
          t.tokens[m] = repl[static_cast<size_t>(m - sp.start)];
      }
      for (SystemAct& a : t.system_acts)
        if (a.slot == slot && !a.value.empty()) a.value = fresh_value(a.value);
      auto it = t.state.find(slot);
      if (it != t.state.end() && it->second != kDontcare) it->second = fresh_value(it->second);
    }
  }
  return out;
}

}  // namespace jdst
