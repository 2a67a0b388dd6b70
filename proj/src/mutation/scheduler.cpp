#include "dbfuzz/mutation/scheduler.hpp"

#include <algorithm>
#include <iterator>

#include "dbfuzz/common/error.hpp"

namespace dbfuzz::mutation {

std::size_t schedule_next(const std::vector<CorpusEntry>& corpus, Rng& rng, Scheduling mode) {
  if (corpus.empty()) throw PreconditionError("cannot schedule from an empty corpus");
  double total = 0.0;
  if (mode == Scheduling::energy)
    for (const auto& e : corpus) total += std::max(0.0, e.energy);
  if (total <= 0.0) return pick(rng, corpus.size());
  const double target = unit_interval(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    acc += std::max(0.0, corpus[i].energy);
    if (target < acc) return i;
  }
  // Rounding left the draw past the last positive entry.
  for (std::size_t i = corpus.size(); i-- > 0;)
    if (corpus[i].energy > 0.0) return i;
  return corpus.size() - 1;
}

const CorpusEntry& schedule_next(const std::vector<CorpusEntry>& corpus, std::uint64_t rng_seed, Scheduling mode) {
  Rng rng(rng_seed);
  return corpus[schedule_next(corpus, rng, mode)];
}

Feedback update_feedback(CorpusEntry entry, const std::vector<std::uint32_t>& new_fingerprint,
                         const std::set<std::uint32_t>& global_seen, const EnergyParams& params) {
  Feedback out;
  for (std::uint32_t id : new_fingerprint)
    if (!global_seen.count(id)) out.newly_covered.push_back(id);
  std::sort(out.newly_covered.begin(), out.newly_covered.end());
  out.newly_covered.erase(std::unique(out.newly_covered.begin(), out.newly_covered.end()), out.newly_covered.end());
  entry.energy = std::max(params.floor,
                          entry.energy * params.decay + params.reward * static_cast<double>(out.newly_covered.size()));
  entry.executions += 1;
  out.entry = std::move(entry);
  return out;
}

}  // namespace dbfuzz::mutation
