#include "dbfuzz/campaign/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/text.hpp"

namespace dbfuzz::campaign {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json ratio_json(const std::optional<Ratio>& r) {
  if (!r) return nullptr;
  return ordered_json{{"numerator", r->numerator}, {"denominator", r->denominator}, {"value", round_to(r->value(), 6)}};
}

std::optional<Ratio> ratio_from(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  const json& r = doc.at(key);
  return Ratio{r.at("numerator").get<std::uint64_t>(), r.at("denominator").get<std::uint64_t>()};
}

constexpr Metric kMetrics[] = {Metric::driver_correctness_ratio, Metric::semantic_correctness_ratio,
                               Metric::branch_total, Metric::reported_bugs, Metric::real_bugs};

bool is_ratio(Metric m) { return m == Metric::driver_correctness_ratio || m == Metric::semantic_correctness_ratio; }

std::string cell(std::optional<double> v, Metric m) {
  if (!v) return "n/a";
  return is_ratio(m) ? format_fixed(*v, 4) : format_fixed(*v, 0);
}

std::string improvement_cell(const std::optional<double>& baseline, const std::optional<double>& treatment,
                             const std::optional<double>& improvement) {
  if (!baseline || !treatment) return "n/a";
  return format_improvement(improvement);
}

class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  std::string render() const {
    std::vector<std::size_t> width(rows_.front().size(), 0);
    for (const auto& r : rows_)
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    std::ostringstream out;
    for (std::size_t n = 0; n < rows_.size(); ++n) {
      for (std::size_t i = 0; i < rows_[n].size(); ++i) {
        if (i) out << " | ";
        out << (i == 0 ? std::left : std::right) << std::setw(static_cast<int>(width[i])) << rows_[n][i];
      }
      out << "\n";
      if (n == 0) {
        for (std::size_t i = 0; i < width.size(); ++i) out << (i ? "-+-" : "") << std::string(width[i], '-');
        out << "\n";
      }
    }
    return out.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace

ordered_json CampaignReport::to_json() const {
  return ordered_json{
      {"name", name},
      {"target", target},
      {"rng_seed", rng_seed},
      {"phases", phases},
      {"drivers",
       {{"count", drivers},
        {"raw_ratio", ratio_json(driver_raw_ratio)},
        {"correctness_ratio", ratio_json(driver_correctness_ratio)}}},
      {"transfer",
       {{"seed_cases", seed_cases},
        {"transferred_cases", transferred_cases},
        {"semantic_correctness_ratio", ratio_json(semantic_correctness_ratio)}}},
      {"fuzz",
       {{"iterations", iterations},
        {"executed_statements", executed_statements},
        {"accepted_statements", accepted_statements},
        {"corpus_size", corpus_size},
        {"branch_total", branch_total}}},
      {"bugs",
       {{"anomalies", anomalies},
        {"reported", reported_bugs},
        {"real", real_bugs},
        {"false_positive", false_positive_bugs}}},
  };
}

CampaignReport CampaignReport::from_json(const json& doc) {
  try {
    CampaignReport r;
    r.name = doc.at("name").get<std::string>();
    r.target = doc.at("target").get<std::string>();
    r.rng_seed = doc.value("rng_seed", std::uint64_t{0});
    r.phases = doc.value("phases", std::vector<std::string>{});
    const json& d = doc.at("drivers");
    r.drivers = d.value("count", std::size_t{0});
    r.driver_raw_ratio = ratio_from(d, "raw_ratio");
    r.driver_correctness_ratio = ratio_from(d, "correctness_ratio");
    const json& t = doc.at("transfer");
    r.seed_cases = t.value("seed_cases", std::size_t{0});
    r.transferred_cases = t.value("transferred_cases", std::size_t{0});
    r.semantic_correctness_ratio = ratio_from(t, "semantic_correctness_ratio");
    const json& f = doc.at("fuzz");
    r.iterations = f.value("iterations", std::uint64_t{0});
    r.executed_statements = f.value("executed_statements", std::uint64_t{0});
    r.accepted_statements = f.value("accepted_statements", std::uint64_t{0});
    r.corpus_size = f.value("corpus_size", std::size_t{0});
    r.branch_total = f.value("branch_total", std::size_t{0});
    const json& b = doc.at("bugs");
    r.anomalies = b.value("anomalies", std::uint64_t{0});
    r.reported_bugs = b.value("reported", std::size_t{0});
    r.real_bugs = b.value("real", std::size_t{0});
    r.false_positive_bugs = b.value("false_positive", std::size_t{0});
    r.validate();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(0, "report", e.what());
  }
}

CampaignReport CampaignReport::load(const std::string& path) {
  try {
    return from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw ParseError(0, path, e.what());
  }
}

void CampaignReport::validate() const {
  for (const auto* r : {&driver_raw_ratio, &driver_correctness_ratio, &semantic_correctness_ratio})
    if (*r && ((*r)->denominator == 0 || (*r)->numerator > (*r)->denominator))
      throw PreconditionError("report '" + name + "': ratio outside [0, 1]");
  if (real_bugs + false_positive_bugs > reported_bugs)
    throw PreconditionError("report '" + name + "': more triaged than reported bugs");
}

void CampaignReport::refresh_bug_counts(const std::vector<monitor::BugReport>& reports) {
  const monitor::BugCounts c = monitor::count_bugs(reports);
  reported_bugs = c.reported;
  real_bugs = c.real;
  false_positive_bugs = c.false_positive;
}

std::string CampaignReport::render() const {
  auto ratio_text = [](const std::optional<Ratio>& r) {
    return r ? r->render(4) + " (" + std::to_string(r->numerator) + "/" + std::to_string(r->denominator) + ")"
             : std::string("n/a");
  };
  TextTable t({"Metric", "Value"});
  t.add({"Driver correctness ratio (model, before repair)", ratio_text(driver_raw_ratio)});
  t.add({"Driver correctness ratio", ratio_text(driver_correctness_ratio)});
  t.add({"Drivers emitted", std::to_string(drivers)});
  t.add({"Seed cases", std::to_string(seed_cases)});
  t.add({"Transferred cases", std::to_string(transferred_cases)});
  t.add({"Semantic correctness ratio", ratio_text(semantic_correctness_ratio)});
  t.add({"Fuzz iterations", std::to_string(iterations)});
  t.add({"Executed statements", std::to_string(executed_statements)});
  t.add({"Accepted statements", std::to_string(accepted_statements)});
  t.add({"Corpus size", std::to_string(corpus_size)});
  t.add({"Branch coverage", std::to_string(branch_total)});
  t.add({"Anomalies", std::to_string(anomalies)});
  t.add({"Reported bugs", std::to_string(reported_bugs)});
  t.add({"Real bugs", std::to_string(real_bugs)});
  std::string out = "Campaign '" + name + "' on " + target + " (rng_seed " + std::to_string(rng_seed) + ")\n";
  out += "Phases: " + (phases.empty() ? std::string("none") : join(phases, ", ")) + "\n\n";
  return out + t.render();
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::driver_correctness_ratio: return "driver_correctness_ratio";
    case Metric::semantic_correctness_ratio: return "semantic_correctness_ratio";
    case Metric::branch_total: return "branch_total";
    case Metric::reported_bugs: return "reported_bugs";
    case Metric::real_bugs: return "real_bugs";
  }
  return "";
}

std::optional<double> metric_value(const CampaignReport& r, Metric metric) {
  switch (metric) {
    case Metric::driver_correctness_ratio:
      return r.driver_correctness_ratio ? std::optional(r.driver_correctness_ratio->value()) : std::nullopt;
    case Metric::semantic_correctness_ratio:
      return r.semantic_correctness_ratio ? std::optional(r.semantic_correctness_ratio->value()) : std::nullopt;
    case Metric::branch_total: return static_cast<double>(r.branch_total);
    case Metric::reported_bugs: return static_cast<double>(r.reported_bugs);
    case Metric::real_bugs: return static_cast<double>(r.real_bugs);
  }
  return std::nullopt;
}

const MetricRow& ComparisonTable::row(Metric metric, const std::string& target) const {
  for (const auto& r : rows)
    if (r.metric == metric && r.target == target) return r;
  throw NotFound("no row for " + std::string(to_string(metric)) + " on " + target);
}

const Aggregate& ComparisonTable::aggregate(Metric metric) const {
  for (const auto& a : aggregates)
    if (a.metric == metric) return a;
  throw NotFound("no aggregate for " + std::string(to_string(metric)));
}

ComparisonTable compare_runs(const std::vector<CampaignReport>& baseline, const std::vector<CampaignReport>& treatment) {
  if (baseline.empty() || treatment.empty()) throw PreconditionError("comparison needs reports in both arms");
  if (baseline.size() != treatment.size()) throw PreconditionError("arms cover a different number of targets");
  ComparisonTable table;
  table.baseline_name = baseline.front().name;
  table.treatment_name = treatment.front().name;
  std::vector<std::pair<const CampaignReport*, const CampaignReport*>> pairs;
  for (const auto& b : baseline) {
    if (std::find(table.targets.begin(), table.targets.end(), b.target) != table.targets.end())
      throw PreconditionError("target '" + b.target + "' appears twice in the baseline arm");
    const auto it = std::find_if(treatment.begin(), treatment.end(), [&](const CampaignReport& t) { return t.target == b.target; });
    if (it == treatment.end()) throw PreconditionError("target '" + b.target + "' has no treatment report");
    table.targets.push_back(b.target);
    pairs.emplace_back(&b, &*it);
  }
  for (Metric m : kMetrics) {
    double sum_b = 0, sum_t = 0, sum_imp = 0;
    bool complete = true, all_defined = true;
    for (const auto& [b, t] : pairs) {
      MetricRow row{m, b->target, metric_value(*b, m), metric_value(*t, m), std::nullopt};
      if (row.baseline && row.treatment) {
        row.improvement = relative_improvement(*row.baseline, *row.treatment);
        sum_b += *row.baseline;
        sum_t += *row.treatment;
      } else {
        complete = false;
      }
      if (row.improvement) sum_imp += *row.improvement;
      else all_defined = false;
      table.rows.push_back(row);
    }
    const double n = static_cast<double>(pairs.size());
    Aggregate agg{m, std::nullopt, std::nullopt};
    if (complete) agg.ratio_of_means = relative_improvement(sum_b / n, sum_t / n);
    if (all_defined) agg.mean_of_ratios = sum_imp / n;
    table.aggregates.push_back(agg);
  }
  return table;
}

ComparisonTable compare_runs(const CampaignReport& baseline, const CampaignReport& treatment) {
  return compare_runs(std::vector{baseline}, std::vector{treatment});
}

ordered_json ComparisonTable::to_json() const {
  auto opt = [](const std::optional<double>& v) -> ordered_json { return v ? ordered_json(round_to(*v, 6)) : nullptr; };
  ordered_json rows_json = ordered_json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"metric", std::string(to_string(r.metric))},
                         {"target", r.target},
                         {"baseline", opt(r.baseline)},
                         {"treatment", opt(r.treatment)},
                         {"improvement", r.baseline && r.treatment ? ordered_json(format_improvement(r.improvement))
                                                                    : ordered_json(nullptr)}});
  ordered_json agg_json = ordered_json::array();
  for (const auto& a : aggregates)
    agg_json.push_back({{"metric", std::string(to_string(a.metric))},
                        {"ratio_of_means", a.ratio_of_means ? ordered_json(format_improvement(a.ratio_of_means)) : nullptr},
                        {"mean_of_ratios", a.mean_of_ratios ? ordered_json(format_improvement(a.mean_of_ratios)) : nullptr}});
  return ordered_json{{"baseline", baseline_name}, {"treatment", treatment_name}, {"targets", targets},
                      {"rows", rows_json}, {"aggregates", agg_json}};
}

std::string ComparisonTable::render() const {
  const std::string& b = baseline_name;
  const std::string& t = treatment_name;
  auto present = [&](Metric m) {
    return std::any_of(rows.begin(), rows.end(), [&](const MetricRow& r) { return r.metric == m && (r.baseline || r.treatment); });
  };
  auto ratio_table = [&](Metric ratio, const std::string& title, const std::string& column) {
    TextTable tt({"Target", column + " " + b, column + " " + t, "Change", "Branches " + b, "Branches " + t, "Change"});
    for (const auto& target : targets) {
      const MetricRow& r = row(ratio, target);
      const MetricRow& br = row(Metric::branch_total, target);
      tt.add({target, cell(r.baseline, ratio), cell(r.treatment, ratio), improvement_cell(r.baseline, r.treatment, r.improvement),
              cell(br.baseline, Metric::branch_total), cell(br.treatment, Metric::branch_total),
              improvement_cell(br.baseline, br.treatment, br.improvement)});
    }
    return title + "\n" + tt.render() + "\n";
  };

  std::string out;
  if (present(Metric::driver_correctness_ratio))
    out += ratio_table(Metric::driver_correctness_ratio, "Driver correctness ratios and branch coverage", "Ratio");
  if (present(Metric::semantic_correctness_ratio))
    out += ratio_table(Metric::semantic_correctness_ratio, "Semantic correctness ratios and branch coverage", "Ratio");

  TextTable bugs({"Target", "Reported " + b, "Real " + b, "Reported " + t, "Real " + t});
  for (const auto& target : targets) {
    const MetricRow& rep = row(Metric::reported_bugs, target);
    const MetricRow& real = row(Metric::real_bugs, target);
    bugs.add({target, cell(rep.baseline, rep.metric), cell(real.baseline, real.metric), cell(rep.treatment, rep.metric),
              cell(real.treatment, real.metric)});
  }
  out += "Reported and real bugs\n" + bugs.render() + "\n";

  TextTable agg({"Metric", "Ratio of means", "Mean of ratios"});
  for (const auto& a : aggregates) {
    if (!present(a.metric)) continue;
    // A zero or absent baseline has no relative change.
    agg.add({std::string(to_string(a.metric)), format_improvement(a.ratio_of_means), format_improvement(a.mean_of_ratios)});
  }
  out += "Aggregate change over " + std::to_string(targets.size()) + " target(s)\n" + agg.render();
  return out;
}

}  // namespace dbfuzz::campaign
