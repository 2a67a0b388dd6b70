#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dbfuzz/connector/sequence.hpp"

namespace dbfuzz::connector {

/// Writes `driver-NNNN.txt` per sequence plus `manifest.json` listing each
/// file's validity, source, calls and transition path. Returns the manifest.
nlohmann::json write_drivers(const std::string& directory, const ApiStateMachine& machine,
                             const std::vector<ApiSequence>& sequences, std::size_t max_len = kDefaultMaxLength);

}  // namespace dbfuzz::connector
