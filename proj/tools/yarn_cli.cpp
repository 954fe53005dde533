// yarn: extraction, evaluation and inspection from the command line.
//
// Exit codes: 0 success, 1 run failures, 2 config or dataset errors.

#include <iostream>

#include "CLI11.hpp"
#include "yarn/cli/commands.hpp"

namespace {

using namespace yarn;
using namespace yarn::cli;

struct Flags {
  std::string config;
  Overrides overrides;
};

RunConfig resolve_config(const Flags& f) {
  return apply_overrides(f.config.empty() ? RunConfig{} : load_config(f.config), f.overrides);
}

bench::DatasetSchema schema_of(const std::string& s) {
  auto v = bench::parse_schema(s);
  if (!v) throw ConfigError("unknown schema '" + s + "' (mcq or arn)");
  return *v;
}

MappingConfig mapping_of(const std::string& arg) {
  if (arg.empty()) return MappingConfig{};
  nlohmann::json j;
  if (fs::exists(arg)) {
    std::ifstream in(arg);
    j = nlohmann::json::parse(in, nullptr, false);
  } else {
    j = nlohmann::json::parse(arg, nullptr, false);
  }
  if (j.is_discarded()) throw ConfigError("--mapping is neither a JSON file nor inline JSON");
  return mapping_config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Story analogy by structural mapping over LLM-built abstractions"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "Run config JSON file");
  app.add_option("--seed", flags.overrides.seed, "Random seed (overrides the config)");
  app.add_option("--store", flags.overrides.store_root, "Store root (overrides the config)");
  app.add_option("--threads", flags.overrides.threads, "Worker threads (overrides the config)");
  app.add_option("--fixtures", flags.overrides.fixtures_dir, "Serve model 'default' from a mock reply directory");

  std::string dataset, schema = "arn", model = "default", specs_file, grid_name, report_name = "report";
  std::vector<std::string> layers{"all"};
  bool force = false, dry_run = false, as_json = false;

  auto* extract = app.add_subcommand("extract", "Build and store representations for a dataset");
  extract->add_option("--dataset", dataset, "Dataset file (JSON lines)")->required();
  extract->add_option("--schema", schema, "mcq or arn");
  extract->add_option("--model", model, "Model tag from the config");
  extract->add_option("--layers", layers, "Layers to build (events, temporal, conceptual0, conceptual1, evaluative, "
                                          "arc, stage0, stage1, all)")
      ->delimiter(',');
  extract->add_flag("--force", force, "Ignore stored layers and rebuild");

  auto* evaluate = app.add_subcommand("evaluate", "Run an experiment grid and write reports");
  evaluate->add_option("--dataset", dataset, "Dataset file (JSON lines)")->required();
  evaluate->add_option("--schema", schema, "mcq or arn");
  auto* specs_opt = evaluate->add_option("--specs", specs_file, "Spec file (JSON list of ablation specs)");
  auto* grid_opt = evaluate->add_option("--grid", grid_name, "Built-in grid: headline, conceptual-levels, stage-levels, granularity");
  specs_opt->excludes(grid_opt);
  evaluate->add_option("--model", model, "Model tag for --grid");
  evaluate->add_option("--report-name", report_name, "Report file stem under <store>/reports");
  evaluate->add_flag("--dry-run", dry_run, "Validate and print planned provider calls only");

  std::string base_id, target_id, mapping_arg;
  auto* explain = app.add_subcommand("explain", "Show the mapping between two stored stories");
  explain->add_option("--base", base_id, "Base story id")->required();
  explain->add_option("--target", target_id, "Target story id")->required();
  explain->add_option("--model", model, "Model tag the representations were built with");
  explain->add_option("--mapping", mapping_arg, "Mapping config as inline JSON or a file");
  explain->add_flag("--json", as_json, "Emit line-delimited trace records");

  std::string clear_what;
  auto* cache = app.add_subcommand("cache", "Inspect or clear the store");
  cache->require_subcommand(1);
  auto* inspect = cache->add_subcommand("inspect", "Summarize stored items");
  auto* clear = cache->add_subcommand("clear", "Delete stored items");
  clear->add_option("what", clear_what, "reps, embeddings, logs, reports or all")->required();

  std::string fixtures_out;
  auto* fixtures = app.add_subcommand("fixtures", "Write mock fixtures from the recorded run log");
  fixtures->add_option("--out", fixtures_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    auto cfg = resolve_config(flags);
    if (*cache || *fixtures) {
      store::Store st(cfg.store_root);
      if (*inspect) cmd_cache_inspect(st, std::cout);
      if (*clear) cmd_cache_clear(st, clear_what, std::cout);
      if (*fixtures) cmd_fixtures(st, fixtures_out, std::cout);
      return kOk;
    }
    Runtime rt(cfg);
    if (*extract) {
      auto items = bench::load_dataset(dataset, schema_of(schema));
      auto s = cmd_extract(rt, items, model, parse_layers(layers), force, std::cout);
      return s.failures.empty() ? kOk : kRunFailures;
    }
    if (*evaluate) {
      auto sc = schema_of(schema);
      std::vector<bench::AblationSpec> specs;
      if (!specs_file.empty()) {
        specs = load_specs(specs_file);
      } else if (!grid_name.empty()) {
        auto g = bench::grid::by_name(grid_name, model);
        if (!g) throw ConfigError("unknown grid '" + grid_name + "'");
        specs = *g;
      } else {
        throw ConfigError("evaluate needs --specs or --grid");
      }
      auto items = bench::load_dataset(dataset, sc);
      return cmd_evaluate(rt, items, sc, specs, {dry_run, report_name}, std::cout);
    }
    if (*explain) {
      auto m = mapping_of(mapping_arg);
      m.rng_seed = *cfg.rng_seed;
      cmd_explain(rt, model, base_id, target_id, m, as_json, std::cout);
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NotFound& e) {
    std::cerr << "not found: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigUnsatisfiable& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunFailures;
  }
  return kOk;
}
