#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "jdst/metrics.hpp"
#include "jdst/model.hpp"
#include "jdst/schedule.hpp"

namespace jdst {

enum class SsSetup { None, Tags, State, Both };

SsSetup parse_ss_setup(const std::string& s);  // none / tags / state / both
const char* ss_setup_name(SsSetup s);

struct TrainConfig {
  std::vector<std::string> train_corpus;  // canonical corpus files, merged
  std::vector<std::string> dev_corpus;
  Real lr = 0.001;
  int embed_dim = 64;
  int act_dim = 0;
  int batch_size = 10;
  int64_t steps = 20000;
  SsSetup ss = SsSetup::None;
  bool separate_encoders = false;
  Real p_min = 0.5;
  Real k_pre_fraction = 0.3;
  uint64_t seed = 1;
  int capacity = 7;
  Real act_threshold = 0.5;
  int min_token_freq = 1;
  int64_t eval_every = 1000;
  Real dropout_max = 0.4;
  std::string checkpoint = "model.ckpt";
  std::string log_path;  // empty = keep the log in memory only

  ModelConfig model_config() const;
  SamplingSchedule tag_schedule() const;    // pinned at 1 unless ss is Tags/Both
  SamplingSchedule state_schedule() const;  // pinned at 1 unless ss is State/Both

  // key=value lines, '#' comments. Unknown keys raise an error listing every
  // valid key.
  static TrainConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  static const std::vector<std::string>& valid_keys();
};

struct TrainResult {
  std::unique_ptr<JointModel> model;
  std::string log;  // line-delimited JSON records
  bool diverged = false;
  int64_t diverged_step = -1;
  bool has_dev_metrics = false;
  MetricsReport final_dev;
  int64_t unreachable_gold = 0;
};

// Runs the full training loop: batched BPTT over whole dialogues, scheduled
// sampling per config, slot value dropout on a linear 0 -> dropout_max
// schedule, ADAM updates, and dev evaluation + checkpointing every
// eval_every steps. Single-threaded and bit-deterministic for a fixed seed.
TrainResult train_model(const Corpus& train, const Corpus& dev, const TrainConfig& cfg);

struct GridPoint {
  Real lr = 0;
  int embed_dim = 0;
  Real p_min = 0;
  Real dev_joint_goal = 0;
};

struct GridResult {
  TrainConfig best;
  Real best_dev_joint_goal = 0;
  std::vector<GridPoint> points;
};

// Trains every (lr, embed_dim, p_min) combination and selects the best dev
// joint goal accuracy; ties break toward lower lr, then smaller embed_dim.
GridResult grid_search(const Corpus& train, const Corpus& dev, const TrainConfig& base,
                       const std::vector<Real>& lrs, const std::vector<int>& embed_dims,
                       const std::vector<Real>& p_mins);

}  // namespace jdst
