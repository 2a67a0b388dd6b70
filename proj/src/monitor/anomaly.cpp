#include "dbfuzz/monitor/anomaly.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "dbfuzz/common/hash.hpp"

namespace dbfuzz::monitor {

std::string_view to_string(Triage triage) {
  switch (triage) {
    case Triage::unreviewed: return "unreviewed";
    case Triage::real: return "real";
    case Triage::false_positive: return "false_positive";
  }
  return "unreviewed";
}

std::optional<Triage> parse_triage(std::string_view text) {
  if (text == "unreviewed") return Triage::unreviewed;
  if (text == "real") return Triage::real;
  if (text == "false_positive" || text == "false-positive") return Triage::false_positive;
  return std::nullopt;
}

namespace {

bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

}  // namespace

std::string normalize_message(std::string_view m) {
  std::string out;
  std::size_t i = 0;
  while (i < m.size()) {
    const char c = m[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      while (i < m.size() && std::isspace(static_cast<unsigned char>(m[i]))) ++i;
      if (!out.empty() && i < m.size()) out += ' ';
      continue;
    }
    const bool boundary = i == 0 || !is_word(m[i - 1]);
    if (boundary && c == '0' && i + 2 < m.size() && (m[i + 1] == 'x' || m[i + 1] == 'X') && is_hex(m[i + 2])) {
      i += 2;
      while (i < m.size() && is_hex(m[i])) ++i;
      out += '@';
      continue;
    }
    if (boundary && is_hex(c)) {
      std::size_t j = i;
      bool digit = false;
      while (j < m.size() && is_hex(m[j])) digit |= is_digit(m[j++]);
      if (j - i >= 8 && digit && (j == m.size() || !is_word(m[j]))) {
        out += '@';
        i = j;
        continue;
      }
    }
    if (is_digit(c)) {
      while (i < m.size() && is_digit(m[i])) ++i;
      out += '#';
      continue;
    }
    out += c;
    ++i;
  }
  return out;
}

std::string dedup_key(std::string_view pattern_id, std::string_view message) {
  std::string material(pattern_id);
  material += '\x1f';
  material += normalize_message(message);
  return content_hash(material);
}

std::vector<Anomaly> match_patterns(const LogEvent& event, const std::vector<ErrorPattern>& catalog) {
  std::vector<const ErrorPattern*> hits;
  for (const auto& p : catalog)
    if (p.matches(event)) hits.push_back(&p);
  std::sort(hits.begin(), hits.end(), [](const ErrorPattern* a, const ErrorPattern* b) { return a->id < b->id; });
  std::vector<Anomaly> out;
  for (const ErrorPattern* p : hits) out.push_back({p->id, p->bug_class, event, dedup_key(p->id, event.message), Triage::unreviewed});
  return out;
}

std::vector<BugReport> dedup_and_report(const std::vector<Anomaly>& anomalies) {
  std::vector<BugReport> out;
  std::map<std::string, std::size_t> index;
  for (const auto& a : anomalies) {
    auto [it, fresh] = index.try_emplace(a.dedup_key, out.size());
    if (fresh) {
      BugReport r;
      r.dedup_key = a.dedup_key;
      r.pattern_id = a.pattern_id;
      r.bug_class = a.bug_class;
      r.first_event = a.event;
      r.triage = a.triage;
      out.push_back(std::move(r));
    }
    BugReport& r = out[it->second];
    ++r.count;
    auto add_unique = [](std::vector<std::string>& v, const std::optional<std::string>& s) {
      if (s && std::find(v.begin(), v.end(), *s) == v.end()) v.push_back(*s);
    };
    add_unique(r.lineage_ids, a.event.case_lineage);
    if (r.case_contexts.size() < kMaxContextsPerReport) add_unique(r.case_contexts, a.event.case_context);
  }
  return out;
}

}  // namespace dbfuzz::monitor
