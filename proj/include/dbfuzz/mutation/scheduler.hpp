#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "dbfuzz/common/rng.hpp"
#include "dbfuzz/mutation/mutator.hpp"

namespace dbfuzz::mutation {

struct EnergyParams {
  double decay = 0.95;
  double reward = 1.0;
  double floor = 0.01;
  /// Energy of a freshly retained entry before its own reward.
  double initial = 1.0;
};

enum class Scheduling { energy, uniform };

/// Index drawn proportionally to energy; uniform when every energy is zero or
/// `mode` is uniform. Throws PreconditionError on an empty corpus.
std::size_t schedule_next(const std::vector<CorpusEntry>& corpus, Rng& rng, Scheduling mode = Scheduling::energy);
const CorpusEntry& schedule_next(const std::vector<CorpusEntry>& corpus, std::uint64_t rng_seed,
                                 Scheduling mode = Scheduling::energy);

struct Feedback {
  CorpusEntry entry;
  std::vector<std::uint32_t> newly_covered;
};

/// newly_covered = offspring fingerprint minus global_seen;
/// energy' = max(floor, energy * decay + reward * |newly_covered|).
Feedback update_feedback(CorpusEntry entry, const std::vector<std::uint32_t>& new_fingerprint,
                         const std::set<std::uint32_t>& global_seen, const EnergyParams& params = {});

}  // namespace dbfuzz::mutation
