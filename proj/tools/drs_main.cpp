// drs — desk-scale PPO trainer for RoboLang program synthesis with dense
// token-level rewards. Subcommands: gen-corpus, pretrain, train, eval,
// report, lint, dump-dfg.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "drs/dfg.hpp"
#include "drs/harness.hpp"
#include "drs/lint.hpp"
#include "drs/parser.hpp"
#include "drs/tokenizer.hpp"

namespace fs = std::filesystem;
using namespace drs;

namespace {

harness::ExperimentConfig load_config(const std::string& config_path,
                                      const std::string& kind) {
  if (!config_path.empty()) return harness::ExperimentConfig::load(config_path);
  return harness::ExperimentConfig::defaults(kind == "general"
                                                 ? harness::ExperimentKind::General
                                                 : harness::ExperimentKind::Robotics);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void progress_printer(const std::string& line) { std::cout << line << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drs: PPO fine-tuning for RoboLang with dense token-level rewards"};
  app.require_subcommand(1);

  std::string config_path, kind = "robotics", out_dir;
  std::uint64_t seed = 0;
  bool has_seed = false, dry_run = false, dump_rewards = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config file");
    cmd->add_option("--seed", seed, "seed override")->each([&has_seed](const std::string&) {
      has_seed = true;
    });
    cmd->add_option("--experiment", kind, "default config kind (general|robotics)")
        ->check(CLI::IsMember({"general", "robotics"}));
    cmd->add_option("--out", out_dir, "output directory override");
  };

  CLI::App* gen = app.add_subcommand("gen-corpus", "generate task corpora");
  add_common(gen);

  CLI::App* pre = app.add_subcommand("pretrain", "supervised pretraining only");
  add_common(pre);

  CLI::App* train = app.add_subcommand("train", "pretrain + PPO + evaluation");
  add_common(train);
  train->add_flag("--dry-run", dry_run, "1 PPO step on 4 tasks, all artifacts");
  train->add_flag("--dump-rewards", dump_rewards,
                  "write per-token reward breakdowns to reward_dump.txt");

  std::string ckpt_path, corpus_path, eval_out;
  CLI::App* ev = app.add_subcommand("eval", "evaluate a checkpoint on a corpus");
  ev->add_option("--ckpt", ckpt_path, "checkpoint file")->required();
  ev->add_option("--corpus", corpus_path, "task corpus file")->required();
  ev->add_option("--out", eval_out, "write the EvalReport JSON here");
  ev->add_option("--config", config_path, "experiment config (decode settings)");

  std::string run_dir;
  CLI::App* rep = app.add_subcommand("report", "render tables from a run directory");
  rep->add_option("--run", run_dir, "run directory")->required();

  std::string lint_file;
  bool show_rules = false;
  CLI::App* lint_cmd = app.add_subcommand("lint", "lint a RoboLang program file");
  lint_cmd->add_flag("--rules", show_rules, "print the rule table");
  lint_cmd->add_option("file", lint_file, "program file");

  std::string dfg_file;
  CLI::App* dfg_cmd =
      app.add_subcommand("dump-dfg", "print a program's data-flow edges");
  dfg_cmd->add_option("file", dfg_file, "program file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      harness::ExperimentConfig cfg = load_config(config_path, kind);
      if (has_seed) cfg.seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      const std::string dir = harness::resolve_run_dir(cfg.out_dir);
      fs::create_directories(dir);
      const auto set = harness::ensure_corpora(cfg, dir);
      std::cout << "wrote " << set.train.size() << " train, " << set.dev.size()
                << " dev, " << set.eval.size() << " eval tasks under " << dir << "\n";
      return 0;
    }
    if (*pre || *train) {
      harness::ExperimentConfig cfg = load_config(config_path, kind);
      if (has_seed) cfg.seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (dry_run) cfg = harness::make_dry_run(cfg);
      if (dump_rewards) cfg.dump_rewards = true;
      if (*pre) cfg.ppo_steps = 0;
      const auto result = harness::run_experiment(cfg, progress_printer);
      std::cout << "run dir: " << result.run_dir << "\n";
      std::cout << harness::render_report(result.eval_before, result.eval_after);
      return 0;
    }
    if (*ev) {
      harness::ExperimentConfig cfg = load_config(config_path, kind);
      const lang::Vocab vocab = lang::Vocab::robolang();
      const lang::Grammar grammar(vocab);
      const model::Net net = model::load_checkpoint(ckpt_path, vocab.hash());
      const auto tasks = harness::load_corpus(corpus_path);
      const harness::EvalReport r =
          harness::evaluate(net, grammar, tasks, cfg.decode_eval);
      std::cout << "pass@1 " << r.pass1 << "\n";
      for (const auto& [name, count] : r.outcome_counts) {
        std::cout << "  " << name << " " << count << "\n";
      }
      if (!eval_out.empty()) {
        std::ofstream f(eval_out, std::ios::binary);
        f << r.to_json() << '\n';
      }
      return 0;
    }
    if (*rep) {
      const fs::path dir(run_dir);
      const fs::path before = dir / "eval_before.json";
      const fs::path after = dir / "eval_after.json";
      if (!fs::exists(before)) throw harness::MissingArtifactsError(before.string());
      if (!fs::exists(after)) throw harness::MissingArtifactsError(after.string());
      const auto rb = harness::EvalReport::from_json(read_file(before.string()));
      const auto ra = harness::EvalReport::from_json(read_file(after.string()));
      const std::string text = harness::render_report(rb, ra);
      std::cout << text;
      std::ofstream f((dir / "report.txt").string(), std::ios::binary);
      f << text;
      return 0;
    }
    if (*lint_cmd) {
      if (show_rules) {
        std::cout << lint::render_rule_table();
        return 0;
      }
      if (lint_file.empty()) throw std::runtime_error("lint: provide a file or --rules");
      const lang::Vocab vocab = lang::Vocab::robolang();
      const auto tp = lang::tokenize(vocab, read_file(lint_file));
      const auto parsed = lang::parse(vocab, tp);
      if (!parsed.ok()) {
        std::cout << "parse error at token " << parsed.error_index << "\n";
        return 1;
      }
      const auto diags = lint::lint(*parsed.ast, tp);
      for (const auto& d : diags) {
        std::cout << d.rule_id << " [" << d.token_span.begin << "," << d.token_span.end
                  << ") " << d.score_delta << " " << d.message << "\n";
      }
      std::cout << "lint_score " << lint::lint_score(diags) << "\n";
      return 0;
    }
    if (*dfg_cmd) {
      const lang::Vocab vocab = lang::Vocab::robolang();
      const auto tp = lang::tokenize(vocab, read_file(dfg_file));
      const auto parsed = lang::parse(vocab, tp);
      if (!parsed.ok()) {
        std::cout << "parse error at token " << parsed.error_index << "\n";
        return 1;
      }
      std::cout << dfg::to_edge_list(dfg::extract_dfg(*parsed.ast));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
