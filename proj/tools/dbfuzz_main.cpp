// Command-line front end: whole campaigns, single phases, triage and reports.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbfuzz/campaign/campaign.hpp"
#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/text.hpp"
#include "dbfuzz/monitor/patterns.hpp"

namespace fs = std::filesystem;
using namespace dbfuzz;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string output_dir;
  std::string scheduling;
};

void add_config_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "Campaign document (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--iterations", o.iterations, "Override the iteration budget");
  cmd->add_option("--seed", o.seed, "Override rng_seed");
  cmd->add_option("--workers", o.workers, "Override the worker count")->check(CLI::PositiveNumber);
  cmd->add_option("-o,--output-dir", o.output_dir, "Override output_dir");
  cmd->add_option("--scheduling", o.scheduling, "Override scheduling")->check(CLI::IsMember({"energy", "uniform"}));
}

campaign::CampaignConfig load_config(const Overrides& o) {
  nlohmann::json doc = nlohmann::json::parse(read_file(o.config));
  if (o.iterations) {
    doc.erase("duration_seconds");
    doc["iterations"] = *o.iterations;
  }
  if (o.seed) doc["rng_seed"] = *o.seed;
  if (o.workers) doc["workers"] = *o.workers;
  if (!o.scheduling.empty()) doc["scheduling"] = o.scheduling;
  if (!o.output_dir.empty()) doc["output_dir"] = fs::absolute(o.output_dir).string();
  return campaign::CampaignConfig::from_json(doc, fs::path(o.config).parent_path().string());
}

int run_phases(const Overrides& o, const campaign::PhaseSelection& phases) {
  const campaign::CampaignConfig config = load_config(o);
  const campaign::CampaignReport report = campaign::run_campaign(config, phases);
  std::cout << report.render();
  std::cout << "\nOutput written to " << config.output_dir << "\n";
  return 0;
}

std::unique_ptr<llm::Provider> provider_from(const std::string& llm_config, const std::string& mock_script) {
  llm::ProviderConfig pc;
  if (!llm_config.empty()) {
    const nlohmann::json doc = nlohmann::json::parse(read_file(llm_config));
    pc = llm::ProviderConfig::from_json(doc.contains("llm") ? doc.at("llm") : doc,
                                        fs::path(llm_config).parent_path().string());
  } else {
    pc.provider = "mock";
    pc.mock_script = mock_script;
  }
  return llm::make_provider(pc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLM-assisted database fuzzing campaigns"};
  app.require_subcommand(1);

  Overrides run_o, drivers_o, transfer_o, fuzz_o;
  auto* run = app.add_subcommand("run", "Run every phase of a campaign");
  add_config_options(run, run_o);
  auto* drivers = app.add_subcommand("synth-drivers", "Synthesize connector drivers from the state machine");
  add_config_options(drivers, drivers_o);
  auto* transfer = app.add_subcommand("transfer-seeds", "Transfer seed corpora into the target dialect");
  add_config_options(transfer, transfer_o);
  auto* fuzz = app.add_subcommand("fuzz", "Run the monitored fuzz loop (resumes an existing corpus)");
  add_config_options(fuzz, fuzz_o);

  auto* mine = app.add_subcommand("mine-patterns", "Mine error patterns from target logs with the model");
  std::vector<std::string> log_files;
  std::string mine_out, llm_config, mock_script;
  mine->add_option("--logs", log_files, "Target log files")->required()->check(CLI::ExistingFile);
  mine->add_option("-o,--out", mine_out, "Catalog to write (JSONL)")->required();
  auto* llm_opt = mine->add_option("--llm-config", llm_config, "JSON file holding an llm block")->check(CLI::ExistingFile);
  mine->add_option("--mock-script", mock_script, "Mock script standing in for the model")
      ->check(CLI::ExistingFile)
      ->excludes(llm_opt);

  auto* triage = app.add_subcommand("triage", "Record a verdict for a bug report");
  std::string triage_dir, bug_id, verdict;
  triage->add_option("-d,--dir", triage_dir, "Campaign output directory")->required()->check(CLI::ExistingDirectory);
  triage->add_option("--id", bug_id, "Bug key or unique prefix")->required();
  triage->add_option("--verdict", verdict, "real or false_positive")
      ->required()
      ->check(CLI::IsMember({"real", "false_positive", "false-positive", "unreviewed"}));

  auto* report = app.add_subcommand("report", "Recount bugs and re-render a campaign report");
  std::string report_dir;
  bool report_json = false;
  report->add_option("-d,--dir", report_dir, "Campaign output directory")->required()->check(CLI::ExistingDirectory);
  report->add_flag("--json", report_json, "Print the machine-readable document");

  auto* compare = app.add_subcommand("compare", "Compare a baseline arm against a treatment arm");
  std::vector<std::string> baseline_files, treatment_files;
  std::string compare_out;
  bool compare_json = false;
  compare->add_option("--baseline", baseline_files, "Baseline report.json files, one per target")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--treatment", treatment_files, "Treatment report.json files, one per target")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_flag("--json", compare_json, "Print the machine-readable table");
  compare->add_option("-o,--out", compare_out, "Also write the JSON table here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_phases(run_o, {true, true, true});
    if (*drivers) return run_phases(drivers_o, {true, false, false});
    if (*transfer) return run_phases(transfer_o, {false, true, false});
    if (*fuzz) return run_phases(fuzz_o, {false, false, true});

    if (*mine) {
      std::vector<monitor::LogEvent> events;
      for (const auto& f : log_files)
        for (const auto& line : split_lines(read_file(f)))
          if (!trim(line).empty()) events.push_back(monitor::parse_log_line(line));
      const auto provider = provider_from(llm_config, mock_script);
      const auto patterns = monitor::mine_patterns(events, *provider);
      write_file(mine_out, monitor::render_catalog(patterns));
      std::cout << "Mined " << patterns.size() << " pattern(s) from " << events.size() << " log line(s) into "
                << mine_out << "\n";
      return 0;
    }
    if (*triage) {
      const auto v = monitor::parse_triage(verdict);
      const auto bug = monitor::triage_bug((fs::path(triage_dir) / "bugs").string(), bug_id, *v);
      std::cout << bug.dedup_key << " -> " << monitor::to_string(bug.triage) << "\n";
      if (fs::exists(fs::path(triage_dir) / "report.json")) campaign::refresh_report(triage_dir);
      return 0;
    }
    if (*report) {
      const campaign::CampaignReport r = campaign::refresh_report(report_dir);
      std::cout << (report_json ? r.to_json().dump(2) + "\n" : r.render());
      return 0;
    }
    if (*compare) {
      std::vector<campaign::CampaignReport> baseline, treatment;
      for (const auto& f : baseline_files) baseline.push_back(campaign::CampaignReport::load(f));
      for (const auto& f : treatment_files) treatment.push_back(campaign::CampaignReport::load(f));
      const campaign::ComparisonTable table = campaign::compare_runs(baseline, treatment);
      std::cout << (compare_json ? table.to_json().dump(2) + "\n" : table.render());
      if (!compare_out.empty()) write_file(compare_out, table.to_json().dump(2) + "\n");
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "dbfuzz: configuration error at " << e.field() << ": " << e.what() << "\n";
    return 2;
  } catch (const NotFound& e) {
    std::cerr << "dbfuzz: not found: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "dbfuzz: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
