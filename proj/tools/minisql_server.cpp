// Serves the mini target over the line protocol on stdin/stdout.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dbfuzz/common/error.hpp"
#include "dbfuzz/target/engine.hpp"
#include "dbfuzz/target/protocol.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mini SQL target speaking the line-delimited JSON protocol"};
  std::string dialect = "minisql";
  std::vector<std::string> faults;
  long hang_delay_us = 200;
  app.add_option("--dialect", dialect, "Grammar variant (minisql or postgresql)");
  app.add_option("--faults", faults, "Fault ids to inject, or 'all'")->delimiter(',');
  app.add_option("--hang-delay-us", hang_delay_us, "Bounded delay standing in for a hang")->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    dbfuzz::target::EngineOptions options;
    const auto d = dbfuzz::sql::parse_dialect(dialect);
    if (!d) throw dbfuzz::ConfigError("--dialect", "unknown dialect '" + dialect + "'");
    options.dialect = *d;
    options.faults = dbfuzz::target::FaultSet::from_ids(faults);
    options.hang_delay = std::chrono::microseconds(hang_delay_us);
    dbfuzz::target::MiniEngine engine(options);
    std::ios::sync_with_stdio(false);
    dbfuzz::target::serve(engine, std::cin, std::cout);
  } catch (const dbfuzz::Error& e) {
    std::cerr << "minisql_server: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
