#include "jdst/repl.hpp"

#include <iostream>
#include <sstream>

namespace jdst {

std::vector<SystemAct> parse_sys_acts(const std::string& line) {
  std::vector<SystemAct> acts;
  size_t i = 0;
  const size_t n = line.size();
  auto skip = [&] {
    while (i < n && (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == ',')) ++i;
  };
  skip();
  while (i < n) {
    size_t start = i;
    while (i < n && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
    if (i == start) throw std::invalid_argument("expected an act name at position " +
                                                std::to_string(i));
    SystemAct act;
    act.type = lowercase(line.substr(start, i - start));
    if (i < n && line[i] == '(') {
      ++i;
      size_t close = line.find(')', i);
      if (close == std::string::npos) throw std::invalid_argument("missing ')' in act '" +
                                                                  act.type + "'");
      std::string inner = line.substr(i, close - i);
      i = close + 1;
      auto eq = inner.find('=');
      if (eq == std::string::npos) {
        act.slot = lowercase(strip(inner));
      } else {
        act.slot = lowercase(strip(inner.substr(0, eq)));
        act.value = lowercase(strip(inner.substr(eq + 1)));
      }
      if (act.slot.empty())
        throw std::invalid_argument("act '" + act.type + "' has empty slot parameter");
    }
    acts.push_back(std::move(act));
    skip();
  }
  if (acts.empty()) throw std::invalid_argument("no acts given");
  return acts;
}

namespace {

void print_turn(std::ostream& out, const TurnPrediction& p, const Turn& turn,
                const Vocab& vocab) {
  double best = 0;
  for (Real v : p.intent_probs) best = std::max(best, v);
  out << "intent: " << p.intent;
  char buf[32];
  std::snprintf(buf, sizeof(buf), " (%.2f)", best);
  out << buf << "\n";

  out << "acts:  ";
  if (p.acts.empty()) out << "(none)";
  for (size_t i = 0; i < p.acts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), " (%.2f)",
                  p.act_probs[static_cast<size_t>(vocab.user_act_id(p.acts[i]))]);
    out << (i ? ", " : "") << p.acts[i] << buf;
  }
  out << "\n";

  out << "tags:  ";
  for (size_t m = 1; m + 1 < turn.tokens.size(); ++m)
    out << " " << turn.tokens[m] << ":" << p.tag_names[m];
  out << "\n";

  out << "values:";
  if (p.mentions.empty()) out << " (none)";
  for (const DecodedMention& mn : p.mentions)
    out << " " << vocab.slots[static_cast<size_t>(mn.slot)] << "=\"" << mn.value << "\"";
  out << "\n";

  out << "state:\n";
  if (p.scored.empty()) out << "  (empty)\n";
  for (const ScoredSlot& s : p.scored) {
    auto it = p.state.find(s.slot);
    out << "  " << s.slot << " = " << (it == p.state.end() ? "(null)" : it->second) << "   [";
    for (size_t i = 0; i < s.values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), ":%.3f", s.probs[i]);
      out << (i ? "  " : "") << s.values[i] << buf;
    }
    out << "]\n";
  }
}

}  // namespace

int run_repl(const JointModel& model, std::istream& in, std::ostream& out) {
  DialogueRunner runner(model);
  std::vector<SystemAct> pending;
  out << "jdst repl. commands: sys <acts>, reset, quit; anything else is a user "
         "utterance.\n";
  std::string line;
  while (out << "> " << std::flush, std::getline(in, line)) {
    std::string s = strip(line);
    if (s.empty()) continue;
    if (s == "quit" || s == "exit") break;
    if (s == "reset") {
      runner.reset();
      pending.clear();
      out << "state cleared\n";
      continue;
    }
    if (s.rfind("sys", 0) == 0 && (s.size() == 3 || std::isspace(static_cast<unsigned char>(s[3])))) {
      try {
        std::vector<SystemAct> acts = parse_sys_acts(s.substr(3));
        for (const SystemAct& a : acts)
          if (model.vocab().system_act_id(a.type) < 0)
            throw std::invalid_argument("unknown system act type '" + a.type + "'");
        pending.insert(pending.end(), acts.begin(), acts.end());
        out << "queued " << acts.size() << " system act(s)\n";
      } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        out << "usage: sys <act>[(slot[=value])] [, <act>...]   e.g. sys offer(time=6 pm)\n";
      }
      continue;
    }
    Turn turn;
    turn.system_acts = pending;
    turn.tokens.push_back(kSosToken);
    for (const std::string& tok : split_ws(lowercase(s))) turn.tokens.push_back(tok);
    turn.tokens.push_back(kEosToken);
    pending.clear();
    TurnResult res = runner.run_turn(turn);
    print_turn(out, res.pred, turn, model.vocab());
  }
  return 0;
}

}  // namespace jdst
