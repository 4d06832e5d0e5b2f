// Command-line surface for the activity-schedule toolkit.
//
// Exit codes: 0 success, 2 usage, 3 I/O or document error,
// 4 validation failure, 5 endpoint failure.

#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "actsched/actsched.hpp"

namespace {

using namespace actsched;

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Shared option plumbing
// ---------------------------------------------------------------------------

struct EndpointArgs {
  std::string config_path;
  std::string base_url;
  std::string model_name;
  std::string api_key_file;
  bool use_mock = false;
  std::uint64_t seed = 0;
  int max_rounds = -1;   // -1 = not set on the command line
  int concurrency = -1;

  CLI::Option* base_url_opt = nullptr;
  CLI::Option* model_opt = nullptr;
  CLI::Option* key_file_opt = nullptr;
  CLI::Option* max_rounds_opt = nullptr;
  CLI::Option* concurrency_opt = nullptr;
};

void add_endpoint_options(CLI::App* cmd, EndpointArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON run-config file (lowest precedence)");
  args.base_url_opt = cmd->add_option("--base-url", args.base_url, "Chat endpoint base URL");
  args.model_opt = cmd->add_option("--model", args.model_name, "Model name for the endpoint");
  args.key_file_opt = cmd->add_option("--api-key-file", args.api_key_file,
                                      "File containing the endpoint key (the key itself is never "
                                      "a flag)");
  cmd->add_flag("--mock", args.use_mock, "Use the deterministic offline endpoint");
  cmd->add_option("--seed", args.seed, "Seed for the offline endpoint and data helpers");
  args.max_rounds_opt = cmd->add_option("--max-rounds", args.max_rounds, "Editor round budget");
  args.concurrency_opt = cmd->add_option("--concurrency", args.concurrency,
                                         "Parallel generation sessions");
}

/// Flags > environment > config file.
RunConfig resolve_run_config(const EndpointArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = parse_run_config_json(read_text_file(args.config_path));
  apply_environment(cfg);
  if (args.base_url_opt && args.base_url_opt->count() > 0) cfg.base_url = args.base_url;
  if (args.model_opt && args.model_opt->count() > 0) cfg.model_name = args.model_name;
  if (args.key_file_opt && args.key_file_opt->count() > 0) {
    cfg.api_key_file = args.api_key_file;
    cfg.api_key.clear();  // an explicit flag outranks an environment key
  }
  if (args.max_rounds_opt && args.max_rounds_opt->count() > 0) cfg.max_rounds = args.max_rounds;
  if (args.concurrency_opt && args.concurrency_opt->count() > 0) {
    cfg.concurrency = args.concurrency;
  }
  finalize_run_config(cfg);
  return cfg;
}

std::unique_ptr<ChatClient> make_client(const EndpointArgs& args, const RunConfig& cfg) {
  if (args.use_mock) return std::make_unique<MockChatClient>(args.seed);
  ChatEndpoint endpoint;
  endpoint.base_url = cfg.base_url;
  endpoint.model_name = cfg.model_name;
  endpoint.api_key = cfg.api_key;
  endpoint.max_rounds = cfg.max_rounds;
  return std::make_unique<HttpChatClient>(endpoint);
}

DurationBounds load_bounds(const std::string& path) {
  if (path.empty()) return DurationBounds::defaults();
  return parse_duration_bounds_json(read_text_file(path));
}

std::vector<CommonsenseRule> load_rules(const std::string& path) {
  if (path.empty()) return default_commonsense_rules();
  return parse_commonsense_rules_json(read_text_file(path));
}

DaySchedule load_schedule_file(const std::string& path) {
  try {
    return parse_schedule_json(read_text_file(path));
  } catch (const DocumentError& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  return file;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateArgs {
  EndpointArgs endpoint;
  std::string profiles_path;
  std::string out_path;
  std::string provenance_path;
  std::string bounds_path;
  std::string rules_path;
  std::string aliases_path;
};

int run_generate(const GenerateArgs& args) {
  RunConfig cfg = resolve_run_config(args.endpoint);
  if (!args.profiles_path.empty()) cfg.profiles_path = args.profiles_path;
  if (!args.out_path.empty()) cfg.output_path = args.out_path;
  if (!args.provenance_path.empty()) cfg.provenance_path = args.provenance_path;
  if (!args.bounds_path.empty()) cfg.bounds_path = args.bounds_path;
  if (!args.rules_path.empty()) cfg.rules_path = args.rules_path;
  if (cfg.profiles_path.empty()) throw UsageError("generate: no profiles path given");
  if (cfg.output_path.empty()) throw UsageError("generate: no output path given");

  AliasTable aliases = default_profile_aliases();
  if (!args.aliases_path.empty()) {
    aliases = parse_alias_table_json(read_text_file(args.aliases_path));
  }
  const auto records = load_profile_records(cfg.profiles_path, aliases);
  const DurationBounds bounds = load_bounds(cfg.bounds_path);
  TrajectoryOptions options;
  options.max_rounds = cfg.max_rounds;
  options.rules = load_rules(cfg.rules_path);

  const auto client = make_client(args.endpoint, cfg);
  std::vector<GenerationResult> results(records.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= records.size()) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        results[i] = generate_trajectory(records[i].profile, *client, bounds, options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.concurrency), std::max<std::size_t>(records.size(), 1));
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  ScheduleSet population;
  population.reserve(records.size());
  std::size_t fallbacks = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    population.push_back({records[i].user_id, results[i].schedule});
    if (results[i].fallback_used) ++fallbacks;
  }
  save_population(cfg.output_path, population);

  if (!cfg.provenance_path.empty()) {
    std::string lines;
    for (std::size_t i = 0; i < records.size(); ++i) {
      for (const ProvenanceRound& round : results[i].log) {
        json doc;
        doc["user_id"] = records[i].user_id;
        const json round_doc = provenance_round_to_json(round);
        for (const auto& [key, value] : round_doc.items()) {
          doc[key] = value;
        }
        lines += doc.dump();
        lines += "\n";
      }
    }
    write_text_file(cfg.provenance_path, lines);
  }

  std::cout << "generated " << population.size() << " schedule(s) (" << fallbacks
            << " via repair fallback) -> " << cfg.output_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string schedules_path;
  std::string profiles_path;
  std::string bounds_path;
  std::string rules_path;
};

int run_validate(const ValidateArgs& args) {
  const ScheduleSet population = load_population(args.schedules_path, /*require_hard_valid=*/false);
  const DurationBounds bounds = load_bounds(args.bounds_path);
  const auto rules = load_rules(args.rules_path);

  std::unordered_map<std::string, UserProfile> profiles;
  if (!args.profiles_path.empty()) {
    for (auto& rec : load_profile_records(args.profiles_path)) {
      profiles.emplace(rec.user_id, std::move(rec.profile));
    }
  }

  std::size_t hard_invalid = 0;
  for (const auto& rec : population) {
    UserProfile profile;  // all-"unknown" when no profile file is given
    if (const auto it = profiles.find(rec.user_id); it != profiles.end()) profile = it->second;
    const auto violations = audit(profile, rec.schedule, bounds, rules);
    bool any_hard = false;
    for (const auto& v : violations) {
      if (hardness_of(v.category) == Hardness::Hard) any_hard = true;
    }
    if (violations.empty()) {
      std::cout << "user " << rec.user_id << ": clean\n";
    } else {
      std::cout << "user " << rec.user_id << ": " << violations.size() << " violation(s)"
                << (any_hard ? "" : " (soft only)") << "\n";
      for (const auto& v : violations) std::cout << "  " << violation_line(v) << "\n";
    }
    if (any_hard) ++hard_invalid;
  }
  std::cout << (population.size() - hard_invalid) << " of " << population.size()
            << " schedule(s) hard-valid\n";
  if (hard_invalid > 0) {
    throw ValidationFailure(std::to_string(hard_invalid) + " schedule(s) violate hard constraints");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// repair / diff
// ---------------------------------------------------------------------------

int run_repair(const std::string& schedules_path, const std::string& out_path) {
  ScheduleSet population = load_population(schedules_path, /*require_hard_valid=*/false);
  for (auto& rec : population) rec.schedule = repair(rec.schedule);
  save_population(out_path, population);
  std::cout << "repaired " << population.size() << " schedule(s) -> " << out_path << "\n";
  return 0;
}

int run_diff(const std::string& from_path, const std::string& to_path,
             const std::string& out_path) {
  const DaySchedule from = load_schedule_file(from_path);
  const DaySchedule to = load_schedule_file(to_path);
  const EditScript script = diff(from, to);
  std::ofstream file;
  std::ostream& out = open_output(file, out_path);
  out << edit_script_json_text(script) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// score-rollouts
// ---------------------------------------------------------------------------

int run_score_rollouts(const std::string& refs_path, const std::string& out_path,
                       const std::string& bounds_path) {
  const DurationBounds bounds = load_bounds(bounds_path);
  std::istringstream in(read_text_file(refs_path));

  std::vector<RolloutRecord> rollouts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rollouts.push_back(parse_rollout_line(line));
    } catch (const IoError& e) {
      throw IoError(refs_path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  std::vector<RewardBreakdown> breakdowns;
  breakdowns.reserve(rollouts.size());
  for (const auto& r : rollouts) {
    breakdowns.push_back(total_reward(r.rollout_text, r.ground_truth, bounds));
  }

  // Group by prompt_id (order of first appearance); singleton groups get a
  // zero advantage by convention.
  std::vector<double> advantages(rollouts.size(), 0.0);
  std::unordered_map<std::string, std::vector<std::size_t>> groups;
  std::vector<std::string> group_order;
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(rollouts[i].prompt_id);
    if (inserted) group_order.push_back(rollouts[i].prompt_id);
    it->second.push_back(i);
  }
  for (const auto& id : group_order) {
    const auto& members = groups[id];
    if (members.size() < 2) continue;
    std::vector<double> totals;
    totals.reserve(members.size());
    for (const std::size_t i : members) totals.push_back(breakdowns[i].total);
    const auto adv = group_advantages(totals);
    for (std::size_t k = 0; k < members.size(); ++k) advantages[members[k]] = adv[k];
  }

  std::ofstream file;
  std::ostream& out = open_output(file, out_path);
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    json doc;
    doc["prompt_id"] = rollouts[i].prompt_id;
    doc["r_fmt"] = breakdowns[i].r_fmt;
    doc["r_con"] = breakdowns[i].r_con;
    doc["r_sim"] = breakdowns[i].r_sim;
    doc["total"] = breakdowns[i].total;
    doc["advantage"] = advantages[i];
    out << doc.dump() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// make-sft-data
// ---------------------------------------------------------------------------

struct SftArgs {
  EndpointArgs endpoint;
  std::string profiles_path;
  std::string drafts_path;
  std::string truth_path;
  std::string out_path;
  std::string bounds_path;
};

int run_make_sft_data(const SftArgs& args) {
  const RunConfig cfg = resolve_run_config(args.endpoint);
  const auto records = load_profile_records(args.profiles_path);
  const ScheduleSet drafts = load_population(args.drafts_path, /*require_hard_valid=*/false);
  const ScheduleSet truth = load_population(args.truth_path, /*require_hard_valid=*/true);

  std::unordered_map<std::string, const DaySchedule*> draft_by_id;
  std::unordered_map<std::string, const DaySchedule*> truth_by_id;
  for (const auto& rec : drafts) draft_by_id.emplace(rec.user_id, &rec.schedule);
  for (const auto& rec : truth) truth_by_id.emplace(rec.user_id, &rec.schedule);

  SftOptions options;
  options.bounds = load_bounds(args.bounds_path);
  const auto client = make_client(args.endpoint, cfg);

  std::string lines;
  std::size_t verbatim = 0;
  for (const auto& rec : records) {
    const auto draft_it = draft_by_id.find(rec.user_id);
    const auto truth_it = truth_by_id.find(rec.user_id);
    if (draft_it == draft_by_id.end()) {
      throw ValidationFailure("no draft schedule for user '" + rec.user_id + "'");
    }
    if (truth_it == truth_by_id.end()) {
      throw ValidationFailure("no ground-truth schedule for user '" + rec.user_id + "'");
    }
    const SftExample ex =
        synthesize_sft_example(rec.profile, *draft_it->second, *truth_it->second, *client, options);
    if (ex.teacher_verbatim) ++verbatim;
    lines += sft_example_to_json(ex).dump();
    lines += "\n";
  }
  write_text_file(args.out_path, lines);
  std::cout << "wrote " << records.size() << " SFT record(s) (" << verbatim
            << " teacher-verbatim) -> " << args.out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int run_evaluate(const std::string& gen_path, const std::string& ref_path,
                 const std::string& out_path) {
  const ScheduleSet gen_set = load_population(gen_path);
  const ScheduleSet ref_set = load_population(ref_path);

  Population gen;
  Population ref;
  for (const auto& rec : gen_set) gen.add(rec.user_id, discretize(rec.schedule));
  for (const auto& rec : ref_set) ref.add(rec.user_id, discretize(rec.schedule));

  MetricReport report;
  try {
    report = evaluate(gen, ref);
  } catch (const std::invalid_argument& e) {
    throw ValidationFailure(e.what());
  }
  std::cout << metric_table(report);
  if (!out_path.empty()) {
    json doc;
    for (const auto& f : metric_fields()) doc[f.name] = report.*(f.member);
    write_text_file(out_path, doc.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Activity-schedule synthesis, validation, and evaluation toolkit"};
  app.require_subcommand(1);

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "Synthesize a schedule per profile");
  gen_cmd->add_option("--profiles", gen_args.profiles_path, "Profile CSV or JSON file");
  gen_cmd->add_option("--out", gen_args.out_path, "Population output path");
  gen_cmd->add_option("--provenance", gen_args.provenance_path, "Per-round provenance JSONL path");
  gen_cmd->add_option("--bounds", gen_args.bounds_path, "Duration-bounds JSON file");
  gen_cmd->add_option("--rules", gen_args.rules_path, "Commonsense-rules JSON file");
  gen_cmd->add_option("--aliases", gen_args.aliases_path, "Profile column alias JSON file");
  add_endpoint_options(gen_cmd, gen_args.endpoint);

  ValidateArgs val_args;
  auto* val_cmd = app.add_subcommand("validate", "Audit schedules against all constraints");
  val_cmd->add_option("--schedules", val_args.schedules_path, "Population file")->required();
  val_cmd->add_option("--profiles", val_args.profiles_path, "Profiles for commonsense checks");
  val_cmd->add_option("--bounds", val_args.bounds_path, "Duration-bounds JSON file");
  val_cmd->add_option("--rules", val_args.rules_path, "Commonsense-rules JSON file");

  std::string repair_in, repair_out;
  auto* repair_cmd = app.add_subcommand("repair", "Deterministically repair schedules");
  repair_cmd->add_option("--schedules", repair_in, "Population file")->required();
  repair_cmd->add_option("--out", repair_out, "Repaired population output path")->required();

  std::string diff_from, diff_to, diff_out;
  auto* diff_cmd = app.add_subcommand("diff", "Edit script turning one schedule into another");
  diff_cmd->add_option("--from", diff_from, "Source schedule document")->required();
  diff_cmd->add_option("--to", diff_to, "Target schedule document")->required();
  diff_cmd->add_option("--out", diff_out, "Output path (default: stdout)");

  std::string score_refs, score_out, score_bounds;
  auto* score_cmd = app.add_subcommand("score-rollouts",
                                       "Reward + advantage per roll-out, grouped by prompt_id");
  score_cmd->add_option("--refs", score_refs, "JSONL roll-out records with ground truth")
      ->required();
  score_cmd->add_option("--out", score_out, "Output path (default: stdout)");
  score_cmd->add_option("--bounds", score_bounds, "Duration-bounds JSON file");

  SftArgs sft_args;
  auto* sft_cmd = app.add_subcommand("make-sft-data", "Teacher-distilled SFT records");
  sft_cmd->add_option("--profiles", sft_args.profiles_path, "Profile file")->required();
  sft_cmd->add_option("--drafts", sft_args.drafts_path, "Draft population file")->required();
  sft_cmd->add_option("--truth", sft_args.truth_path, "Ground-truth population file")->required();
  sft_cmd->add_option("--out", sft_args.out_path, "SFT JSONL output path")->required();
  sft_cmd->add_option("--bounds", sft_args.bounds_path, "Duration-bounds JSON file");
  add_endpoint_options(sft_cmd, sft_args.endpoint);

  std::string eval_gen, eval_ref, eval_out;
  auto* eval_cmd = app.add_subcommand("evaluate", "12-metric report for generated vs reference");
  eval_cmd->add_option("--gen", eval_gen, "Generated population file")->required();
  eval_cmd->add_option("--ref", eval_ref, "Reference population file")->required();
  eval_cmd->add_option("--out", eval_out, "Metric JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen_cmd->parsed()) return run_generate(gen_args);
    if (val_cmd->parsed()) return run_validate(val_args);
    if (repair_cmd->parsed()) return run_repair(repair_in, repair_out);
    if (diff_cmd->parsed()) return run_diff(diff_from, diff_to, diff_out);
    if (score_cmd->parsed()) return run_score_rollouts(score_refs, score_out, score_bounds);
    if (sft_cmd->parsed()) return run_make_sft_data(sft_args);
    if (eval_cmd->parsed()) return run_evaluate(eval_gen, eval_ref, eval_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const EndpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DocumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
