#include "dbfuzz/campaign/config.hpp"

#include <filesystem>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/text.hpp"

namespace dbfuzz::campaign {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

template <typename T>
T get(const json& obj, const char* key, const std::string& path, T fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  try {
    return v->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path, "has the wrong type");
  }
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

std::string existing_file(const std::string& base_dir, const json& value, const std::string& path) {
  if (!value.is_string() || value.get<std::string>().empty()) throw ConfigError(path, "must be a non-empty path");
  const std::string resolved = resolve(base_dir, value.get<std::string>());
  if (!fs::is_regular_file(resolved)) throw ConfigError(path, "file '" + resolved + "' does not exist");
  return resolved;
}

void expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, "must be an object");
}

TargetConfig parse_target(const json& block, const std::string& base_dir) {
  expect_object(block, "target");
  TargetConfig t;
  const std::string kind = get<std::string>(block, "kind", "target.kind", "mini_target");
  if (kind == "mini_target") {
    t.kind = TargetConfig::Kind::mini_target;
  } else if (kind == "subprocess") {
    t.kind = TargetConfig::Kind::subprocess;
    t.argv = get<std::vector<std::string>>(block, "argv", "target.argv", {});
    if (t.argv.empty()) throw ConfigError("target.argv", "required for a subprocess target");
    t.argv.front() = resolve(base_dir, t.argv.front());
  } else {
    throw ConfigError("target.kind", "unknown kind '" + kind + "' (expected 'mini_target' or 'subprocess')");
  }
  const std::string dialect = get<std::string>(block, "dialect", "target.dialect", "minisql");
  const auto d = sql::parse_dialect(dialect);
  if (!d) throw ConfigError("target.dialect", "unknown dialect '" + dialect + "'");
  t.dialect = *d;
  t.faults = target::FaultSet::from_ids(get<std::vector<std::string>>(block, "faults", "target.faults", {}));
  const auto hang = get<std::int64_t>(block, "hang_delay_us", "target.hang_delay_us", 200);
  if (hang < 0) throw ConfigError("target.hang_delay_us", "must be non-negative");
  t.hang_delay = std::chrono::microseconds(hang);
  t.label = get<std::string>(block, "label", "target.label", kind);
  return t;
}

}  // namespace

CampaignConfig CampaignConfig::from_json(const json& doc, const std::string& base_dir) {
  expect_object(doc, "(document)");
  CampaignConfig c;
  c.name = get<std::string>(doc, "name", "name", "campaign");

  const json* target = find(doc, "target");
  if (target == nullptr) throw ConfigError("target", "is required");
  c.target = parse_target(*target, base_dir);

  const json* iterations = find(doc, "iterations");
  const json* duration = find(doc, "duration_seconds");
  if ((iterations == nullptr) == (duration == nullptr))
    throw ConfigError("iterations", "exactly one of 'iterations' and 'duration_seconds' must be set");
  if (iterations) {
    if (!iterations->is_number_unsigned() && !(iterations->is_number_integer() && iterations->get<std::int64_t>() >= 0))
      throw ConfigError("iterations", "must be a non-negative integer");
    c.iterations = iterations->get<std::uint64_t>();
  } else {
    if (!duration->is_number() || duration->get<double>() <= 0)
      throw ConfigError("duration_seconds", "must be a positive number");
    c.duration = std::chrono::milliseconds(static_cast<std::int64_t>(duration->get<double>() * 1000.0));
  }

  const auto workers = get<std::int64_t>(doc, "workers", "workers", 1);
  if (workers < 1) throw ConfigError("workers", "must be at least 1");
  c.workers = static_cast<std::size_t>(workers);
  c.rng_seed = get<std::uint64_t>(doc, "rng_seed", "rng_seed", 1);

  const json* llm = find(doc, "llm");
  if (llm == nullptr) throw ConfigError("llm", "is required");
  c.llm = llm::ProviderConfig::from_json(*llm, base_dir, "llm");
  if (c.llm.provider.empty()) throw ConfigError("llm.provider", "is required");
  if (!c.llm.mock_script.empty() && !fs::is_regular_file(c.llm.mock_script))
    throw ConfigError("llm.mock_script", "file '" + c.llm.mock_script + "' does not exist");

  const json* corpus = find(doc, "corpus");
  if (corpus == nullptr) throw ConfigError("corpus", "is required");
  if (corpus->is_string()) {
    c.corpus.push_back(existing_file(base_dir, *corpus, "corpus"));
  } else if (corpus->is_array() && !corpus->empty()) {
    for (std::size_t i = 0; i < corpus->size(); ++i)
      c.corpus.push_back(existing_file(base_dir, corpus->at(i), "corpus[" + std::to_string(i) + "]"));
  } else {
    throw ConfigError("corpus", "must be a path or a non-empty list of paths");
  }

  if (const json* sm = find(doc, "state_machine")) c.state_machine = existing_file(base_dir, *sm, "state_machine");
  if (const json* driver = find(doc, "driver")) {
    expect_object(*driver, "driver");
    c.driver.max_length = get<std::size_t>(*driver, "max_length", "driver.max_length", c.driver.max_length);
    c.driver.budget = get<std::size_t>(*driver, "budget", "driver.budget", c.driver.budget);
    c.driver.llm_samples = get<std::size_t>(*driver, "llm_samples", "driver.llm_samples", c.driver.llm_samples);
    c.driver.repair_iterations =
        get<std::size_t>(*driver, "repair_iterations", "driver.repair_iterations", c.driver.repair_iterations);
    if (c.driver.max_length == 0) throw ConfigError("driver.max_length", "must be at least 1");
    if (c.driver.budget == 0) throw ConfigError("driver.budget", "must be at least 1");
  }

  const json* patterns = find(doc, "patterns");
  if (patterns == nullptr) throw ConfigError("patterns", "is required");
  c.patterns = existing_file(base_dir, *patterns, "patterns");
  if (const json* extra = find(doc, "extra_patterns")) {
    if (!extra->is_array()) throw ConfigError("extra_patterns", "must be a list of paths");
    for (std::size_t i = 0; i < extra->size(); ++i)
      c.extra_patterns.push_back(existing_file(base_dir, extra->at(i), "extra_patterns[" + std::to_string(i) + "]"));
  }

  const json* out = find(doc, "output_dir");
  if (out == nullptr || !out->is_string() || out->get<std::string>().empty())
    throw ConfigError("output_dir", "must be a non-empty path");
  c.output_dir = resolve(base_dir, out->get<std::string>());

  const std::string scheduling = get<std::string>(doc, "scheduling", "scheduling", "energy");
  if (scheduling == "energy") c.scheduling = mutation::Scheduling::energy;
  else if (scheduling == "uniform") c.scheduling = mutation::Scheduling::uniform;
  else throw ConfigError("scheduling", "unknown mode '" + scheduling + "' (expected 'energy' or 'uniform')");

  if (const json* m = find(doc, "mutation")) {
    expect_object(*m, "mutation");
    c.mutation.max_ops = get<std::size_t>(*m, "max_ops", "mutation.max_ops", c.mutation.max_ops);
    c.mutation.attempts = get<std::size_t>(*m, "attempts", "mutation.attempts", c.mutation.attempts);
    if (c.mutation.max_ops == 0) throw ConfigError("mutation.max_ops", "must be at least 1");
    if (c.mutation.attempts == 0) throw ConfigError("mutation.attempts", "must be at least 1");
  }
  if (const json* e = find(doc, "energy")) {
    expect_object(*e, "energy");
    c.energy.decay = get<double>(*e, "decay", "energy.decay", c.energy.decay);
    c.energy.reward = get<double>(*e, "reward", "energy.reward", c.energy.reward);
    c.energy.floor = get<double>(*e, "floor", "energy.floor", c.energy.floor);
    c.energy.initial = get<double>(*e, "initial", "energy.initial", c.energy.initial);
    if (c.energy.decay < 0 || c.energy.decay > 1) throw ConfigError("energy.decay", "must lie in [0, 1]");
    if (c.energy.reward < 0) throw ConfigError("energy.reward", "must be non-negative");
    if (c.energy.floor < 0) throw ConfigError("energy.floor", "must be non-negative");
    if (c.energy.initial < 0) throw ConfigError("energy.initial", "must be non-negative");
  }
  c.retain_new_coverage = get<bool>(doc, "retain_new_coverage", "retain_new_coverage", true);
  return c;
}

CampaignConfig CampaignConfig::load(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(0, path, e.what());
  }
  return from_json(doc, fs::path(path).parent_path().string());
}

mutation::FuzzConfig CampaignConfig::fuzz_config() const {
  mutation::FuzzConfig f;
  f.iterations = iterations.value_or(0);
  f.duration = duration;
  f.rng_seed = rng_seed;
  f.workers = workers;
  f.scheduling = scheduling;
  f.energy = energy;
  f.mutation = mutation;
  f.retain_new_coverage = retain_new_coverage;
  return f;
}

}  // namespace dbfuzz::campaign
