#include "dbfuzz/transfer/mask.hpp"

#include <algorithm>
#include <map>

#include "dbfuzz/common/hash.hpp"
#include "dbfuzz/sql/lexer.hpp"
#include "dbfuzz/sql/splitter.hpp"

namespace dbfuzz::transfer {

std::string placeholder_line(std::string_view placeholder_id) { return std::string(kMaskPrefix) + std::string(placeholder_id); }

MaskedSql mask_unparsable(const sql::SqlTestCase& test_case, const sql::Grammar& grammar) {
  MaskedSql out;
  out.dialect = test_case.dialect;
  out.lineage_id = test_case.lineage_id;
  out.schema = test_case.schema;
  for (std::size_t i = 0; i < test_case.statements.size(); ++i) {
    const std::string& stmt = test_case.statements[i];
    if (grammar.accepts_statement(stmt)) {
      out.visible_text += sql::terminate_statement(stmt) + "\n";
      continue;
    }
    MaskedRegion region;
    region.placeholder_id = stable_uuid(test_case.lineage_id + "|" + std::to_string(i) + "|" + stmt);
    region.original_fragment = stmt;
    const std::string line = placeholder_line(region.placeholder_id);
    region.offset = out.visible_text.size();
    region.length = line.size();
    out.visible_text += line + "\n";
    out.masked_regions.push_back(std::move(region));
  }
  out.parse_ok = grammar.accepts_script(out.visible_text);
  return out;
}

sql::SqlTestCase unmask(const MaskedSql& masked, std::string_view text) {
  // Locate surviving placeholders; each cuts the text up to its line end.
  std::map<std::size_t, std::pair<std::size_t, const MaskedRegion*>> cuts;
  for (const auto& region : masked.masked_regions) {
    const std::string marker = placeholder_line(region.placeholder_id);
    const auto first = text.find(marker);
    if (first == std::string_view::npos) continue;
    if (text.find(marker, first + 1) != std::string_view::npos)
      throw PlaceholderError("placeholder " + region.placeholder_id + " occurs more than once");
    auto end = text.find('\n', first);
    if (end == std::string_view::npos) end = text.size();
    cuts[first] = {end, &region};
  }

  sql::SqlTestCase out;
  out.dialect = masked.dialect;
  out.lineage_id = masked.lineage_id;
  out.schema = masked.schema;
  out.origin = sql::Origin::mutated;
  std::size_t cursor = 0;
  auto take_chunk = [&](std::size_t until) {
    if (until <= cursor) return;
    for (auto& s : sql::split_statements(text.substr(cursor, until - cursor))) {
      // Comment-only leftovers (e.g. a mangled marker) are not statements.
      const sql::LexResult lex = sql::tokenize(s);
      if (!lex.error && lex.tokens.size() <= 1) continue;
      out.statements.push_back(std::move(s));
    }
  };
  for (const auto& [begin, cut] : cuts) {
    if (begin < cursor) throw PlaceholderError("overlapping placeholders");
    take_chunk(begin);
    out.statements.push_back(cut.second->original_fragment);
    cursor = cut.first;
  }
  take_chunk(text.size());
  if (out.statements.empty()) throw PlaceholderError("unmasked case has no statements");
  return out;
}

}  // namespace dbfuzz::transfer
