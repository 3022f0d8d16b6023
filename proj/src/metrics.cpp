#include "jdst/metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace jdst {

using nlohmann::json;

namespace {

// Gold IOB tag names straight from span annotations; independent of any
// model tag indexing so unseen slots still compare correctly.
std::vector<std::string> gold_tag_names(const Turn& turn) {
  std::vector<std::string> tags(turn.tokens.size(), "O");
  for (const SlotSpan& sp : turn.spans) {
    tags[sp.start] = "B-" + sp.slot;
    for (int m = sp.start + 1; m < sp.end; ++m) tags[m] = "I-" + sp.slot;
  }
  return tags;
}

}  // namespace

MetricsReport compute_metrics(const std::vector<std::vector<TurnPrediction>>& predictions,
                              const Corpus& gold) {
  if (predictions.size() != gold.size())
    throw std::invalid_argument("compute_metrics: dialogue count mismatch: " +
                                std::to_string(predictions.size()) + " vs " +
                                std::to_string(gold.size()));
  MetricsReport r;
  size_t intent_turns = 0, intent_hits = 0, frame_hits = 0, joint_hits = 0;
  int64_t act_tp = 0, act_fp = 0, act_fn = 0;
  int64_t slot_tp = 0, slot_fp = 0, slot_fn = 0;

  for (size_t di = 0; di < gold.size(); ++di) {
    const Dialogue& d = gold[di];
    if (predictions[di].size() != d.turns.size())
      throw std::invalid_argument("compute_metrics: turn count mismatch in dialogue '" + d.id +
                                  "'");
    for (size_t ti = 0; ti < d.turns.size(); ++ti) {
      const Turn& turn = d.turns[ti];
      const TurnPrediction& p = predictions[di][ti];
      ++r.turns;

      if (!turn.intent.empty()) {
        ++intent_turns;
        if (p.intent == turn.intent) ++intent_hits;
      }

      std::set<std::string> gold_acts(turn.user_acts.begin(), turn.user_acts.end());
      std::set<std::string> pred_acts(p.acts.begin(), p.acts.end());
      for (const std::string& a : pred_acts)
        gold_acts.count(a) ? ++act_tp : ++act_fp;
      for (const std::string& a : gold_acts)
        if (!pred_acts.count(a)) ++act_fn;

      std::vector<std::string> gt = gold_tag_names(turn);
      bool frame_ok = p.tag_names.size() == gt.size();
      if (frame_ok)
        for (size_t m = 1; m + 1 < gt.size(); ++m)
          if (p.tag_names[m] != gt[m]) {
            frame_ok = false;
            break;
          }
      if (frame_ok) ++frame_hits;
      r.frame_correct.push_back(frame_ok ? 1 : 0);

      bool joint_ok = p.state == turn.state;
      if (joint_ok) ++joint_hits;
      r.joint_goal_correct.push_back(joint_ok ? 1 : 0);

      for (const auto& [slot, value] : p.state)
        turn.state.count(slot) && turn.state.at(slot) == value ? ++slot_tp : ++slot_fp;
      for (const auto& [slot, value] : turn.state)
        if (!p.state.count(slot) || p.state.at(slot) != value) ++slot_fn;
    }
  }

  auto f1 = [](int64_t tp, int64_t fp, int64_t fn) -> Real {
    if (tp == 0) return (fp == 0 && fn == 0) ? 1.0 : 0.0;
    Real prec = static_cast<Real>(tp) / static_cast<Real>(tp + fp);
    Real rec = static_cast<Real>(tp) / static_cast<Real>(tp + fn);
    return 2.0 * prec * rec / (prec + rec);
  };
  r.intent_accuracy =
      intent_turns ? static_cast<Real>(intent_hits) / static_cast<Real>(intent_turns) : 1.0;
  r.act_f1 = f1(act_tp, act_fp, act_fn);
  r.slot_frame_accuracy =
      r.turns ? static_cast<Real>(frame_hits) / static_cast<Real>(r.turns) : 1.0;
  r.joint_goal_accuracy =
      r.turns ? static_cast<Real>(joint_hits) / static_cast<Real>(r.turns) : 1.0;
  r.dst_slot_f1 = f1(slot_tp, slot_fp, slot_fn);
  return r;
}

std::string MetricsReport::to_json() const {
  json j;
  j["intent_accuracy"] = intent_accuracy;
  j["act_f1"] = act_f1;
  j["slot_frame_accuracy"] = slot_frame_accuracy;
  j["joint_goal_accuracy"] = joint_goal_accuracy;
  j["dst_slot_f1"] = dst_slot_f1;
  j["turns"] = turns;
  return j.dump();
}

std::string MetricsReport::to_table() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-8s %-12s %-11s %-10s %-8s\n"
                "%-8s %-12s %-11s %-10s %-8s\n"
                "%-8.3f %-12.3f %-11.3f %-10.3f %-8.3f\n",
                "Intent", "Dialogue Act", "Slot Frame", "Joint Goal", "DST Slot",
                "Accuracy", "F1 Score", "Accuracy", "Accuracy", "F1 Score",
                intent_accuracy, act_f1, slot_frame_accuracy, joint_goal_accuracy, dst_slot_f1);
  return buf;
}

Real mcnemar_from_counts(int64_t b, int64_t c) {
  const int64_t n = b + c;
  if (n == 0) return 1.0;
  const int64_t k = std::min(b, c);
  long double sum = 0.0L;
  const long double log2l = std::log(2.0L);
  for (int64_t i = 0; i <= k; ++i) {
    long double logterm = std::lgamma(static_cast<long double>(n + 1)) -
                          std::lgamma(static_cast<long double>(i + 1)) -
                          std::lgamma(static_cast<long double>(n - i + 1)) -
                          static_cast<long double>(n) * log2l;
    sum += std::exp(logterm);
  }
  long double p = 2.0L * sum;
  return static_cast<Real>(p > 1.0L ? 1.0L : p);
}

Real mcnemar_test(const std::vector<uint8_t>& correct_a,
                  const std::vector<uint8_t>& correct_b) {
  if (correct_a.size() != correct_b.size())
    throw std::invalid_argument("mcnemar_test: bitmap length mismatch: " +
                                std::to_string(correct_a.size()) + " vs " +
                                std::to_string(correct_b.size()));
  int64_t b = 0, c = 0;
  for (size_t i = 0; i < correct_a.size(); ++i) {
    if (correct_a[i] && !correct_b[i]) ++b;
    if (!correct_a[i] && correct_b[i]) ++c;
  }
  return mcnemar_from_counts(b, c);
}

}  // namespace jdst
