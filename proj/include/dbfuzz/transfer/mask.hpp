#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/sql/parser.hpp"
#include "dbfuzz/sql/types.hpp"

namespace dbfuzz::transfer {

inline constexpr std::string_view kMaskPrefix = "-- @MASK:";

struct MaskedRegion {
  std::string placeholder_id;
  std::string original_fragment;
  /// Span of the placeholder line (without its newline) in visible_text.
  std::size_t offset = 0;
  std::size_t length = 0;
};

/// A test case whose unparsable statements were replaced by inert comment
/// lines. Each placeholder occurs exactly once in visible_text.
struct MaskedSql {
  std::string visible_text;
  std::vector<MaskedRegion> masked_regions;
  bool parse_ok = false;

  std::string dialect;
  std::string lineage_id;
  std::shared_ptr<const sql::SchemaContext> schema;
};

class PlaceholderError : public Error {
 public:
  using Error::Error;
};

std::string placeholder_line(std::string_view placeholder_id);

MaskedSql mask_unparsable(const sql::SqlTestCase& test_case, const sql::Grammar& grammar);

/// Restores every placeholder still present in `mutated_visible_text`;
/// deleted placeholders drop their fragment. Throws PlaceholderError when a
/// placeholder occurs more than once or nothing remains.
sql::SqlTestCase unmask(const MaskedSql& masked, std::string_view mutated_visible_text);

}  // namespace dbfuzz::transfer
