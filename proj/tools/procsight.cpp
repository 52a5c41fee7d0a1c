#include <CLI11.hpp>
#include <iostream>

#include "procsight/cli.hpp"
#include "procsight/errors.hpp"

using namespace procsight;

int main(int argc, char** argv) {
  CLI::App app{"procsight - predictive process monitoring with built-in model audits"};
  app.require_subcommand(1);

  std::string config_path;
  std::string bundle_dir;
  std::string out_dir;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;

  auto add_common = [&](CLI::App* cmd, bool needs_bundle) {
    cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
    if (needs_bundle) {
      cmd->add_option("--bundle", bundle_dir, "Trained model bundle directory")->required();
    }
    cmd->add_option("--out", out_dir, "Output directory (default: config output_dir)");
    cmd->add_option("--seed", seed_override, "Override the config seed")
        ->each([&](const std::string&) { has_seed_override = true; });
  };

  CLI::App* validate = app.add_subcommand("validate", "Parse the log and summarize schema and labels");
  add_common(validate, false);

  CLI::App* train = app.add_subcommand("train", "Train one model per bucket and write a bundle");
  add_common(train, false);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score the temporal test split with a bundle");
  add_common(evaluate, true);

  CLI::App* explain = app.add_subcommand("explain", "Global, local and PDP explanations");
  add_common(explain, true);
  bool global = false;
  std::vector<std::string> local_args;
  std::string pdp_feature;
  std::string bucket_id;
  int grid_size = 20;
  explain->add_flag("--global", global, "Feature importance and a tree surrogate per bucket");
  explain->add_option("--local", local_args, "case_id prefix_len: explain one running prefix")
      ->expected(2);
  explain->add_option("--pdp", pdp_feature, "Partial dependence for one feature");
  explain->add_option("--bucket", bucket_id, "Bucket id for --pdp (default: first bucket)");
  explain->add_option("--grid-size", grid_size, "PDP grid size (default 20)");

  CLI::App* audit = app.add_subcommand("audit", "Leakage, availability and sparsity reports");
  add_common(audit, false);
  audit->add_option("--bundle", bundle_dir, "Trained model bundle directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config = load_config(config_path);
    if (has_seed_override) {
      config.seed = seed_override;
      config.training.seed = seed_override;
      config.explainer_params.seed = seed_override;
    }
    const std::string out = out_dir.empty() ? config.output_dir : out_dir;

    if (validate->parsed()) return cli::cmd_validate(config, std::cout);
    if (train->parsed()) return cli::cmd_train(config, out);
    if (evaluate->parsed()) return cli::cmd_evaluate(config, bundle_dir, out);
    if (explain->parsed()) {
      cli::ExplainRequest request;
      request.global = global;
      if (!local_args.empty()) {
        request.local_case_id = local_args[0];
        request.local_prefix_len = std::stoi(local_args[1]);
      }
      if (!pdp_feature.empty()) request.pdp_feature = pdp_feature;
      if (!bucket_id.empty()) request.bucket_id = bucket_id;
      request.pdp_grid_size = grid_size;
      return cli::cmd_explain(config, bundle_dir, request, out);
    }
    if (audit->parsed()) return cli::cmd_audit(config, bundle_dir, out);
  } catch (const Error& e) {
    std::cerr << "procsight: " << e.what() << "\n";
    return cli::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "procsight: " << e.what() << "\n";
    return cli::kExitInputError;
  }
  return cli::kExitInputError;
}
