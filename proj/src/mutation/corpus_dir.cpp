#include "dbfuzz/mutation/corpus_dir.hpp"

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/common/text.hpp"
#include "dbfuzz/sql/corpus_io.hpp"

namespace dbfuzz::mutation {

namespace fs = std::filesystem;

void save_corpus_dir(const std::string& directory, const std::vector<CorpusEntry>& corpus) {
  fs::create_directories(directory);
  for (const auto& item : fs::directory_iterator(directory)) {
    const auto ext = item.path().extension();
    if (ext == ".sql" || ext == ".fp") fs::remove(item.path());
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CorpusEntry& e = corpus[i];
    write_file((fs::path(directory) / (e.id + ".sql")).string(), sql::render_corpus({e.test_case}));
    nlohmann::json side{{"index", i},
                        {"origin", std::string(sql::to_string(e.test_case.origin))},
                        {"energy", e.energy},
                        {"executions", e.executions},
                        {"executed", e.executed},
                        {"fingerprint", e.fingerprint}};
    write_file((fs::path(directory) / (e.id + ".fp")).string(), side.dump() + "\n");
  }
}

std::vector<CorpusEntry> load_corpus_dir(const std::string& directory) {
  std::vector<std::pair<std::size_t, CorpusEntry>> loaded;
  if (!fs::is_directory(directory)) return {};
  for (const auto& item : fs::directory_iterator(directory)) {
    if (item.path().extension() != ".sql") continue;
    CorpusEntry e;
    e.id = item.path().stem().string();
    auto cases = sql::load_corpus(item.path().string());
    if (cases.size() != 1) throw ParseError(0, item.path().string(), "corpus entry must hold exactly one case");
    e.test_case = std::move(cases.front());
    std::size_t index = loaded.size();
    const fs::path side = fs::path(directory) / (e.id + ".fp");
    if (fs::exists(side)) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_file(side.string()));
      } catch (const nlohmann::json::exception& ex) {
        throw ParseError(0, side.string(), ex.what());
      }
      index = j.value("index", index);
      e.energy = j.value("energy", 1.0);
      e.executions = j.value("executions", std::uint64_t{0});
      e.executed = j.value("executed", false);
      e.fingerprint = j.value("fingerprint", std::vector<std::uint32_t>{});
      e.test_case.origin = sql::parse_origin(j.value("origin", "corpus")).value_or(sql::Origin::corpus);
    }
    loaded.emplace_back(index, std::move(e));
  }
  std::sort(loaded.begin(), loaded.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second.id < b.second.id;
  });
  std::vector<CorpusEntry> out;
  for (auto& [i, e] : loaded) out.push_back(std::move(e));
  return out;
}

}  // namespace dbfuzz::mutation
