#include "dbfuzz/connector/driver_io.hpp"

#include <cstdio>
#include <filesystem>

#include "dbfuzz/common/text.hpp"

namespace dbfuzz::connector {

nlohmann::json write_drivers(const std::string& directory, const ApiStateMachine& machine,
                             const std::vector<ApiSequence>& sequences, std::size_t max_len) {
  std::filesystem::create_directories(directory);
  nlohmann::json manifest;
  manifest["machine"] = machine.name();
  manifest["max_length"] = max_len;
  manifest["drivers"] = nlohmann::json::array();
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "driver-%04zu.txt", i);
    const ValidationReport report = validate_sequence(machine, sequences[i], max_len);
    write_file((std::filesystem::path(directory) / name).string(), render_driver(machine, sequences[i]));
    nlohmann::json entry{{"file", name},
                         {"source", std::string(to_string(sequences[i].source))},
                         {"valid", report.valid},
                         {"calls", sequences[i].calls},
                         {"transition_path", nlohmann::json::array()}};
    for (std::size_t r : report.rule_path) entry["transition_path"].push_back(machine.rules()[r].render());
    if (!report.valid) entry["violation"] = report.message;
    manifest["drivers"].push_back(std::move(entry));
  }
  write_file((std::filesystem::path(directory) / "manifest.json").string(), manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace dbfuzz::connector
