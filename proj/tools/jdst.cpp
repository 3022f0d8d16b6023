#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "jdst/checkpoint.hpp"
#include "jdst/metrics.hpp"
#include "jdst/repl.hpp"
#include "jdst/simulate.hpp"
#include "jdst/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace jdst;

namespace {

Corpus load_many(const std::vector<std::string>& paths) {
  std::vector<Corpus> parts;
  for (const std::string& p : paths) parts.push_back(load_corpus(p));
  return merge_corpora(parts);
}

std::string resolve_split(const std::string& split, const std::string& data_dir) {
  std::string dir = data_dir;
  if (dir.empty())
    if (const char* env = std::getenv("JDST_DATA_DIR")) dir = env;
  if (dir.empty())
    throw std::runtime_error("no --corpus given and neither --data-dir nor JDST_DATA_DIR set");
  return (fs::path(dir) / (split + ".json")).string();
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& corpus,
              const std::vector<std::string>& dev, const std::string& ss,
              bool separate_encoders, int64_t seed, const std::string& checkpoint,
              int64_t steps) {
  TrainConfig cfg = config_path.empty() ? TrainConfig{} : TrainConfig::from_file(config_path);
  // flags override config-file keys
  if (!corpus.empty()) cfg.train_corpus = corpus;
  if (!dev.empty()) cfg.dev_corpus = dev;
  if (!ss.empty()) cfg.ss = parse_ss_setup(ss);
  if (separate_encoders) cfg.separate_encoders = true;
  if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
  if (!checkpoint.empty()) cfg.checkpoint = checkpoint;
  if (steps > 0) cfg.steps = steps;

  if (cfg.train_corpus.empty()) {
    std::cerr << "error: missing corpus path (set train_corpus in the config or pass --corpus)\n";
    return 2;
  }
  Corpus train = load_many(cfg.train_corpus);
  Corpus devc = cfg.dev_corpus.empty() ? Corpus{} : load_many(cfg.dev_corpus);
  if (train.empty()) {
    std::cerr << "error: training corpus is empty\n";
    return 2;
  }

  TrainResult res = train_model(train, devc, cfg);
  if (res.diverged) {
    std::cerr << "error: training diverged (non-finite loss) at step " << res.diverged_step
              << "\n";
    return 1;
  }
  std::cout << "trained " << cfg.steps << " steps; checkpoint written to " << cfg.checkpoint
            << "\n";
  if (res.has_dev_metrics) std::cout << res.final_dev.to_table();
  if (res.unreachable_gold > 0)
    std::cout << "unreachable-gold turns during training: " << res.unreachable_gold << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, std::vector<std::string> corpus,
             const std::string& split, const std::string& data_dir,
             const std::string& dump_states, const std::string& report_path) {
  if (corpus.empty()) corpus.push_back(resolve_split(split, data_dir));
  auto model = JointModel::load(checkpoint);
  Corpus gold = load_many(corpus);
  auto preds = run_inference(*model, gold);
  MetricsReport m = compute_metrics(preds, gold);
  std::cout << m.to_table();

  json rec;
  rec["checkpoint"] = checkpoint;
  rec["corpus"] = corpus;
  rec["metrics"] = json::parse(m.to_json());
  std::string bitmap(m.joint_goal_correct.size(), '0');
  for (size_t i = 0; i < m.joint_goal_correct.size(); ++i)
    if (m.joint_goal_correct[i]) bitmap[i] = '1';
  rec["joint_goal_bitmap"] = bitmap;
  std::cout << rec.dump() << "\n";
  if (!report_path.empty()) {
    std::ofstream os(report_path, std::ios::app);
    os << rec.dump() << "\n";
  }

  if (!dump_states.empty()) {
    std::ofstream os(dump_states, std::ios::trunc);
    for (size_t di = 0; di < gold.size(); ++di)
      for (size_t ti = 0; ti < preds[di].size(); ++ti) {
        json line;
        line["dialogue_id"] = gold[di].id;
        line["turn"] = ti;
        line["slots"] = json::array();
        for (const ScoredSlot& s : preds[di][ti].scored) {
          json js;
          js["slot"] = s.slot;
          js["values"] = s.values;
          js["probs"] = s.probs;
          line["slots"].push_back(js);
        }
        os << line.dump() << "\n";
      }
    std::cout << "state dump written to " << dump_states << "\n";
  }
  return 0;
}

int cmd_gridsearch(const std::string& config_path, const std::string& lrs,
                   const std::string& dims, const std::string& pmins) {
  TrainConfig base = TrainConfig::from_file(config_path);
  if (base.train_corpus.empty() || base.dev_corpus.empty()) {
    std::cerr << "error: grid search needs train_corpus and dev_corpus in the config\n";
    return 2;
  }
  Corpus train = load_many(base.train_corpus);
  Corpus dev = load_many(base.dev_corpus);

  auto reals = [](const std::string& s, Real fallback) {
    std::vector<Real> out;
    for (const std::string& p : split_on(s, ','))
      if (!strip(p).empty()) out.push_back(std::stod(strip(p)));
    if (out.empty()) out.push_back(fallback);
    return out;
  };
  auto ints = [](const std::string& s, int fallback) {
    std::vector<int> out;
    for (const std::string& p : split_on(s, ','))
      if (!strip(p).empty()) out.push_back(std::stoi(strip(p)));
    if (out.empty()) out.push_back(fallback);
    return out;
  };
  GridResult res = grid_search(train, dev, base, reals(lrs, base.lr),
                               ints(dims, base.embed_dim), reals(pmins, base.p_min));
  std::cout << "best: lr=" << res.best.lr << " embed_dim=" << res.best.embed_dim
            << " p_min=" << res.best.p_min
            << " dev_joint_goal=" << res.best_dev_joint_goal << "\n";
  for (const GridPoint& p : res.points)
    std::cout << "  lr=" << p.lr << " embed_dim=" << p.embed_dim << " p_min=" << p.p_min
              << " -> " << p.dev_joint_goal << "\n";
  return 0;
}

int cmd_inspect(const std::string& checkpoint) {
  std::string meta;
  auto entries = read_checkpoint(checkpoint, &meta);
  std::cout << "metadata: " << json::parse(meta).dump(2) << "\n";
  int64_t total = 0;
  std::cout << "parameters:\n";
  for (const CheckpointEntry& e : entries) {
    Real norm = 0;
    for (Real v : e.value.data) norm += v * v;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-28s %-10s %8lld  l2=%.4f\n", e.id.c_str(),
                  e.value.shape_str().c_str(), static_cast<long long>(e.value.numel()),
                  std::sqrt(norm));
    std::cout << buf;
    total += e.value.numel();
  }
  std::cout << "total: " << entries.size() << " tensors, " << total << " values\n";
  return 0;
}

int cmd_repl(const std::string& checkpoint) {
  auto model = JointModel::load(checkpoint);
  return run_repl(*model, std::cin, std::cout);
}

int cmd_simulate(const std::string& out_dir, const std::string& domain, int n_train, int n_dev,
                 int n_test, uint64_t seed) {
  SimOptions opt;
  if (n_train > 0) opt.n_train = n_train;
  if (n_dev > 0) opt.n_dev = n_dev;
  if (n_test > 0) opt.n_test = n_test;
  opt.seed = seed;
  auto write = [&](const SimCorpora& c, const std::string& name) {
    fs::create_directories(fs::path(out_dir) / name);
    save_corpus(c.train, (fs::path(out_dir) / name / "train.json").string());
    save_corpus(c.dev, (fs::path(out_dir) / name / "dev.json").string());
    save_corpus(c.test, (fs::path(out_dir) / name / "test.json").string());
    std::cout << name << ": " << c.train.size() << " train / " << c.dev.size() << " dev / "
              << c.test.size() << " test dialogues\n";
  };
  if (domain == "restaurant" || domain == "both") write(generate_restaurant_corpus(opt), "sim-r");
  if (domain == "movie" || domain == "both") {
    SimOptions m = opt;
    if (n_train <= 0) m.n_train = 384;
    if (n_dev <= 0) m.n_dev = 120;
    if (n_test <= 0) m.n_test = 264;
    m.seed = opt.seed + 1;
    write(generate_movie_corpus(m), "sim-m");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint language understanding and dialogue state tracking"};
  app.require_subcommand(1);

  std::string config, ss, checkpoint = "model.ckpt", split = "test", data_dir, dump_states,
                      report, lrs, dims, pmins, out_dir = "data", domain = "both";
  std::vector<std::string> corpus, dev;
  bool separate_encoders = false;
  int64_t seed = -1, steps = -1;
  int n_train = -1, n_dev = -1, n_test = -1;
  uint64_t sim_seed = 7;

  auto* train = app.add_subcommand("train", "train a model from a config file");
  train->add_option("--config", config, "key=value config file");
  train->add_option("--corpus", corpus, "training corpus file(s); overrides the config")
      ->delimiter(',');
  train->add_option("--dev", dev, "dev corpus file(s)")->delimiter(',');
  train->add_option("--ss", ss, "scheduled sampling setup: none, tags, state or both");
  train->add_flag("--separate-encoders", separate_encoders,
                  "use separate LU and DST encoders");
  train->add_option("--seed", seed, "rng seed");
  train->add_option("--checkpoint", checkpoint, "checkpoint output path");
  train->add_option("--steps", steps, "training steps");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a corpus");
  eval->add_option("--checkpoint", checkpoint, "checkpoint path")->required();
  eval->add_option("--corpus", corpus, "evaluation corpus file(s)")->delimiter(',');
  eval->add_option("--split", split, "split name resolved under the data directory");
  eval->add_option("--data-dir", data_dir, "data directory (or env JDST_DATA_DIR)");
  eval->add_option("--dump-states", dump_states, "write per-turn scored value sets (jsonl)");
  eval->add_option("--report", report, "append the metrics record to this file");

  auto* repl = app.add_subcommand("repl", "interactive session against a checkpoint");
  repl->add_option("--checkpoint", checkpoint, "checkpoint path")->required();

  auto* grid = app.add_subcommand("gridsearch", "grid search over lr / embed_dim / p_min");
  grid->add_option("--config", config, "base config file")->required();
  grid->add_option("--lrs", lrs, "comma-separated learning rates");
  grid->add_option("--dims", dims, "comma-separated embedding dims");
  grid->add_option("--pmins", pmins, "comma-separated minimum keep probabilities");

  auto* inspect = app.add_subcommand("inspect-checkpoint", "print checkpoint contents");
  inspect->add_option("--checkpoint", checkpoint, "checkpoint path")->required();

  auto* sim = app.add_subcommand("simulate", "generate synthetic corpora");
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--domain", domain, "restaurant, movie or both");
  sim->add_option("--train", n_train, "training dialogues");
  sim->add_option("--dev", n_dev, "dev dialogues");
  sim->add_option("--test", n_test, "test dialogues");
  sim->add_option("--seed", sim_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed())
      return cmd_train(config, corpus, dev, ss, separate_encoders, seed, checkpoint, steps);
    if (eval->parsed())
      return cmd_eval(checkpoint, corpus, split, data_dir, dump_states, report);
    if (repl->parsed()) return cmd_repl(checkpoint);
    if (grid->parsed()) return cmd_gridsearch(config, lrs, dims, pmins);
    if (inspect->parsed()) return cmd_inspect(checkpoint);
    if (sim->parsed())
      return cmd_simulate(out_dir, domain, n_train, n_dev, n_test, sim_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
