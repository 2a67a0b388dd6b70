#pragma once

#include <string>
#include <vector>

#include "dbfuzz/mutation/mutator.hpp"

namespace dbfuzz::mutation {

/// One `<id>.sql` file per entry plus a `<id>.fp` JSON sidecar holding the
/// fingerprint, energy, executions and origin. Stale files are removed.
void save_corpus_dir(const std::string& directory, const std::vector<CorpusEntry>& corpus);
/// Entries in id order; an absent directory yields an empty corpus.
std::vector<CorpusEntry> load_corpus_dir(const std::string& directory);

}  // namespace dbfuzz::mutation
