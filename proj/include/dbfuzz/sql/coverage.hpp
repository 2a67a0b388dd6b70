#pragma once

#include <cstdint>
#include <vector>

namespace dbfuzz::sql {

struct BranchCounter {
  std::uint32_t branch_id = 0;
  std::uint64_t hits = 0;
  friend bool operator==(const BranchCounter&, const BranchCounter&) = default;
};

/// Hit counters for manually instrumented conditionals. A conditional at
/// source site `s` owns branch ids 2s (not taken) and 2s+1 (taken). Sites are
/// derived from a per-file base plus the source line, so ids are stable for
/// identical source.
class Coverage {
 public:
  bool edge(std::uint32_t site, bool taken) {
    bump(site * 2 + (taken ? 1U : 0U));
    return taken;
  }
  void clear();
  /// Sorted ids with at least one hit.
  std::vector<std::uint32_t> fingerprint() const;
  std::vector<BranchCounter> counters() const;
  void merge_into(std::vector<std::uint32_t>& sorted_ids) const;

 private:
  void bump(std::uint32_t id);
  std::vector<std::uint64_t> hits_;
  std::vector<std::uint32_t> touched_;
};

inline bool cover(Coverage* coverage, std::uint32_t site, bool taken) {
  if (coverage != nullptr) coverage->edge(site, taken);
  return taken;
}

}  // namespace dbfuzz::sql

// Records which way a condition went. Each instrumented file defines
// `constexpr std::uint32_t kCoverageBase`.
#define DBFUZZ_COND(coverage, cond) (::dbfuzz::sql::cover((coverage), kCoverageBase + __LINE__, static_cast<bool>(cond)))
