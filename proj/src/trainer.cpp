#include "jdst/trainer.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "jdst/adam.hpp"

namespace jdst {

using nlohmann::json;

SsSetup parse_ss_setup(const std::string& s) {
  std::string v = lowercase(strip(s));
  if (v == "none") return SsSetup::None;
  if (v == "tags") return SsSetup::Tags;
  if (v == "state") return SsSetup::State;
  if (v == "both") return SsSetup::Both;
  throw std::invalid_argument("unknown scheduled-sampling setup '" + s +
                              "' (expected none, tags, state or both)");
}

const char* ss_setup_name(SsSetup s) {
  switch (s) {
    case SsSetup::None: return "none";
    case SsSetup::Tags: return "tags";
    case SsSetup::State: return "state";
    case SsSetup::Both: return "both";
  }
  return "?";
}

ModelConfig TrainConfig::model_config() const {
  ModelConfig m;
  m.embed_dim = embed_dim;
  m.act_dim = act_dim;
  m.candidate_capacity = capacity;
  m.act_threshold = act_threshold;
  m.separate_encoders = separate_encoders;
  return m;
}

SamplingSchedule TrainConfig::tag_schedule() const {
  if (ss != SsSetup::Tags && ss != SsSetup::Both) return SamplingSchedule::pinned();
  return {static_cast<int64_t>(k_pre_fraction * static_cast<Real>(steps)), steps, p_min};
}

SamplingSchedule TrainConfig::state_schedule() const {
  if (ss != SsSetup::State && ss != SsSetup::Both) return SamplingSchedule::pinned();
  return {static_cast<int64_t>(k_pre_fraction * static_cast<Real>(steps)), steps, p_min};
}

const std::vector<std::string>& TrainConfig::valid_keys() {
  static const std::vector<std::string> keys = {
      "train_corpus", "dev_corpus",     "lr",          "embed_dim",      "act_dim",
      "batch_size",   "steps",          "ss",          "separate_encoders",
      "p_min",        "k_pre_fraction", "seed",        "capacity",       "act_threshold",
      "min_token_freq", "eval_every",   "dropout_max", "checkpoint",     "log"};
  return keys;
}

void TrainConfig::set(const std::string& key, const std::string& value) {
  auto as_bool = [&](const std::string& v) {
    std::string s = lowercase(strip(v));
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + v + "'");
  };
  auto paths = [](const std::string& v) {
    std::vector<std::string> out;
    for (const std::string& p : split_on(v, ','))
      if (!strip(p).empty()) out.push_back(strip(p));
    return out;
  };
  if (key == "train_corpus") train_corpus = paths(value);
  else if (key == "dev_corpus") dev_corpus = paths(value);
  else if (key == "lr") lr = std::stod(value);
  else if (key == "embed_dim") embed_dim = std::stoi(value);
  else if (key == "act_dim") act_dim = std::stoi(value);
  else if (key == "batch_size") batch_size = std::stoi(value);
  else if (key == "steps") steps = std::stoll(value);
  else if (key == "ss") ss = parse_ss_setup(value);
  else if (key == "separate_encoders") separate_encoders = as_bool(value);
  else if (key == "p_min") p_min = std::stod(value);
  else if (key == "k_pre_fraction") k_pre_fraction = std::stod(value);
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "capacity") capacity = std::stoi(value);
  else if (key == "act_threshold") act_threshold = std::stod(value);
  else if (key == "min_token_freq") min_token_freq = std::stoi(value);
  else if (key == "eval_every") eval_every = std::stoll(value);
  else if (key == "dropout_max") dropout_max = std::stod(value);
  else if (key == "checkpoint") checkpoint = strip(value);
  else if (key == "log") log_path = strip(value);
  else
    throw std::invalid_argument("unknown config key '" + key + "'; valid keys: " +
                                join(valid_keys().begin(), valid_keys().end(), ", "));
}

TrainConfig TrainConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  TrainConfig cfg;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string s = strip(line);
    if (s.empty() || s[0] == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key=value, got '" + s + "'");
    cfg.set(strip(s.substr(0, eq)), strip(s.substr(eq + 1)));
  }
  return cfg;
}

TrainResult train_model(const Corpus& train, const Corpus& dev, const TrainConfig& cfg) {
  if (train.empty()) throw std::invalid_argument("train_model: empty training corpus");
  TrainResult res;
  Vocab vocab = Vocab::build(train, cfg.min_token_freq);
  auto model = std::make_unique<JointModel>(vocab, cfg.model_config(), cfg.seed);
  Adam adam(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8});
  Rng rng(cfg.seed + 0x9e3779b97f4a7c15ull);

  const SamplingSchedule tag_sched = cfg.tag_schedule();
  const SamplingSchedule state_sched = cfg.state_schedule();

  // gold labels are fixed per turn; build them once
  std::vector<std::vector<TurnGold>> gold(train.size());
  for (size_t i = 0; i < train.size(); ++i)
    for (const Turn& turn : train[i].turns)
      gold[i].push_back(make_turn_gold(turn, model->vocab(), model->tags()));

  std::vector<size_t> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  size_t cursor = order.size();  // triggers a shuffle on first use

  std::ostringstream log;
  Tape tape;
  const int batch = std::max(1, std::min<int>(cfg.batch_size, static_cast<int>(train.size())));

  for (int64_t step = 1; step <= cfg.steps; ++step) {
    const Real p_c = keep_probability(step, tag_sched);
    const Real p_d = keep_probability(step, state_sched);
    const Real p_drop = dropout_probability(step, cfg.steps, cfg.dropout_max);

    tape.clear();
    std::vector<Var> batch_losses;
    size_t batch_turns = 0;
    for (int b = 0; b < batch; ++b) {
      if (cursor >= order.size()) {
        rng.shuffle(order);
        cursor = 0;
      }
      const size_t di = order[cursor++];
      const Dialogue& dlg = train[di];
      DialogueRunner runner(*model, &tape);
      const std::map<std::string, std::string>* prev_gold_state = nullptr;
      for (size_t ti = 0; ti < dlg.turns.size(); ++ti) {
        const Turn& turn = dlg.turns[ti];
        std::vector<std::string> dropped =
            apply_slot_value_dropout(turn.tokens, turn.spans, p_drop, rng);
        RunOptions opts;
        opts.training = true;
        opts.gold = &gold[di][ti];
        opts.use_gold_tags = rng.bernoulli(p_c);
        opts.use_gold_prev_state = rng.bernoulli(p_d);
        opts.input_tokens = &dropped;
        opts.prev_gold_state = prev_gold_state;
        TurnResult tr = runner.run_turn(turn, opts);
        res.unreachable_gold += tr.unreachable_gold;
        batch_losses.push_back(tr.loss);
        ++batch_turns;
        prev_gold_state = &turn.state;
      }
    }
    Var total = tape.add_n(batch_losses);
    const Real loss = tape.scalar(total);
    if (!std::isfinite(loss)) {
      res.diverged = true;
      res.diverged_step = step;
      res.log = log.str();
      res.model = std::move(model);
      return res;
    }
    tape.backward(total);
    adam.step(model->params());

    json rec;
    rec["step"] = step;
    rec["loss"] = loss;
    rec["turns"] = batch_turns;
    rec["p_c"] = p_c;
    rec["p_D"] = p_d;
    rec["dropout_p"] = p_drop;
    const bool cadence = cfg.eval_every > 0 && (step % cfg.eval_every == 0 || step == cfg.steps);
    if (cadence) {
      if (!dev.empty()) {
        MetricsReport m = compute_metrics(run_inference(*model, dev), dev);
        rec["dev"] = json::parse(m.to_json());
        res.final_dev = m;
        res.has_dev_metrics = true;
      }
      if (!cfg.checkpoint.empty()) model->save(cfg.checkpoint);
    }
    log << rec.dump() << "\n";
  }

  if (!cfg.checkpoint.empty()) model->save(cfg.checkpoint);
  res.log = log.str();
  if (!cfg.log_path.empty()) {
    std::ofstream os(cfg.log_path, std::ios::trunc);
    os << res.log;
  }
  res.model = std::move(model);
  return res;
}

GridResult grid_search(const Corpus& train, const Corpus& dev, const TrainConfig& base,
                       const std::vector<Real>& lrs, const std::vector<int>& embed_dims,
                       const std::vector<Real>& p_mins) {
  if (lrs.empty() || embed_dims.empty() || p_mins.empty())
    throw std::invalid_argument("grid_search: every axis needs at least one value");
  std::vector<Real> slr = lrs;
  std::vector<int> sdim = embed_dims;
  std::vector<Real> spm = p_mins;
  std::sort(slr.begin(), slr.end());
  std::sort(sdim.begin(), sdim.end());
  std::sort(spm.begin(), spm.end());

  GridResult out;
  bool first = true;
  for (Real lr : slr)
    for (int dim : sdim)
      for (Real pm : spm) {
        TrainConfig cfg = base;
        cfg.lr = lr;
        cfg.embed_dim = dim;
        cfg.p_min = pm;
        cfg.checkpoint.clear();  // grid runs keep nothing on disk
        cfg.log_path.clear();
        TrainResult r = train_model(train, dev, cfg);
        Real jg = 0.0;
        if (!r.diverged) {
          MetricsReport m = compute_metrics(run_inference(*r.model, dev), dev);
          jg = m.joint_goal_accuracy;
        }
        out.points.push_back({lr, dim, pm, jg});
        // strict > plus ascending iteration = ties keep the lowest lr, then
        // the smallest embedding dim
        if (first || jg > out.best_dev_joint_goal) {
          first = false;
          out.best_dev_joint_goal = jg;
          out.best = cfg;
        }
        std::cerr << "grid: lr=" << lr << " embed_dim=" << dim << " p_min=" << pm
                  << " dev_joint_goal=" << jg << "\n";
      }
  return out;
}

}  // namespace jdst
