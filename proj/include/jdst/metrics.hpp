#pragma once

#include <string>
#include <vector>

#include "jdst/data.hpp"
#include "jdst/model.hpp"

namespace jdst {

struct MetricsReport {
  Real intent_accuracy = 0;
  Real act_f1 = 0;                 // micro over (turn, act) pairs
  Real slot_frame_accuracy = 0;    // all IOB tags right (SOS/EOS excluded)
  Real joint_goal_accuracy = 0;    // full state match; dontcare is a value
  Real dst_slot_f1 = 0;            // micro over (turn, slot, value), null excluded
  size_t turns = 0;
  std::vector<uint8_t> joint_goal_correct;  // per-turn bitmap (McNemar input)
  std::vector<uint8_t> frame_correct;

  std::string to_json() const;   // line-delimited record
  std::string to_table() const;  // human-readable, Table-1 column layout
};

// Inference-mode metrics: predictions must come from run_inference (predicted
// tags and predicted previous state throughout). Errors when predictions and
// corpus disagree on dialogue/turn counts.
MetricsReport compute_metrics(const std::vector<std::vector<TurnPrediction>>& predictions,
                              const Corpus& gold);

// Exact two-sided binomial McNemar test on discordant pair counts
// b (A-only correct) and c (B-only correct); b + c = 0 gives p = 1.
Real mcnemar_test(const std::vector<uint8_t>& correct_a, const std::vector<uint8_t>& correct_b);
Real mcnemar_from_counts(int64_t b, int64_t c);

}  // namespace jdst
