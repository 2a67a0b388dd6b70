#include "dbfuzz/sql/coverage.hpp"

#include <algorithm>

namespace dbfuzz::sql {

void Coverage::bump(std::uint32_t id) {
  if (id >= hits_.size()) hits_.resize(std::max<std::size_t>(id + 1, hits_.size() * 2), 0);
  if (hits_[id]++ == 0) touched_.push_back(id);
}

void Coverage::clear() {
  for (auto id : touched_) hits_[id] = 0;
  touched_.clear();
}

std::vector<std::uint32_t> Coverage::fingerprint() const {
  std::vector<std::uint32_t> ids = touched_;
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<BranchCounter> Coverage::counters() const {
  std::vector<BranchCounter> out;
  for (auto id : fingerprint()) out.push_back({id, hits_[id]});
  return out;
}

void Coverage::merge_into(std::vector<std::uint32_t>& sorted_ids) const {
  std::vector<std::uint32_t> mine = fingerprint();
  std::vector<std::uint32_t> merged;
  merged.reserve(sorted_ids.size() + mine.size());
  std::set_union(sorted_ids.begin(), sorted_ids.end(), mine.begin(), mine.end(), std::back_inserter(merged));
  sorted_ids.swap(merged);
}

}  // namespace dbfuzz::sql
