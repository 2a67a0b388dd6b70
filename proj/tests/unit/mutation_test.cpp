#include <gtest/gtest.h>

#include <filesystem>
#include <map>

#include "dbfuzz/mutation/corpus_dir.hpp"
#include "dbfuzz/mutation/fuzzer.hpp"
#include "dbfuzz/mutation/mutator.hpp"
#include "dbfuzz/mutation/scheduler.hpp"
#include "dbfuzz/sql/parser.hpp"
#include "dbfuzz/target/engine.hpp"
#include "dbfuzz/transfer/mask.hpp"
#include "dbfuzz/transfer/transfer.hpp"
#include "sql_gen.hpp"
#include "test_support.hpp"

namespace dbfuzz::mutation {
namespace {

CorpusEntry entry_of(std::vector<std::string> statements, std::string id = "e1") {
  CorpusEntry e;
  e.id = id;
  e.test_case.statements = std::move(statements);
  e.test_case.dialect = "minisql";
  e.test_case.lineage_id = std::move(id);
  return e;
}

sql::SchemaContext schema_of(const sql::SqlTestCase& c) {
  target::MiniEngine engine;
  return transfer::capture_schema(c, engine);
}

const std::vector<std::string> kScript = {
    "CREATE TABLE t(a INT, b TEXT)", "CREATE TABLE u(c REAL, d INT)", "INSERT INTO t VALUES (1, 'x'), (2, 'y')",
    "INSERT INTO u VALUES (1.5, 3)", "SELECT a, b FROM t WHERE a > 1 ORDER BY a", "SELECT COUNT(*) FROM u WHERE d = 3"};

TEST(Mutate, SameSeedSameMutant) {
  const CorpusEntry e = entry_of(kScript);
  const sql::SchemaContext schema = schema_of(e.test_case);
  for (std::uint64_t seed = 1; seed < 200; ++seed) {
    const sql::SqlTestCase a = mutate(e, seed, schema);
    const sql::SqlTestCase b = mutate(e, seed, schema);
    ASSERT_EQ(a.statements, b.statements);
    EXPECT_EQ(a.origin, sql::Origin::mutated);
    EXPECT_FALSE(a.statements.empty());
  }
}

TEST(Mutate, DeleteSkippedOnSingleStatement) {
  const CorpusEntry e = entry_of({"SELECT 1 + 2"});
  for (std::uint64_t seed = 1; seed < 500; ++seed) {
    const Mutant m = mutate_with_trace(e, seed, {});
    EXPECT_FALSE(m.test_case.statements.empty());
    // A delete is only recorded when something else was there to keep.
    if (!m.applied.empty() && m.applied.front() == OpKind::statement_delete) EXPECT_TRUE(false) << seed;
  }
}

TEST(Mutate, DeleteAloneNeverEmpties) {
  const CorpusEntry e = entry_of({"SELECT 1"});
  Rng rng(1);
  EXPECT_EQ(apply_to_statement(OpKind::statement_delete, "SELECT 1", rng, {}), std::nullopt);
  MutationParams p;
  p.max_ops = 8;
  for (std::uint64_t seed = 1; seed < 300; ++seed) EXPECT_FALSE(mutate(e, seed, {}, p).statements.empty());
}

TEST(Mutate, RenameStaysInsideSchemaAndText) {
  testing::SqlGen gen(31);
  std::size_t renamed = 0;
  for (int i = 0; i < 10000; ++i) {
    const sql::SqlTestCase c = gen.make_case(6, 0.0, "r" + std::to_string(i));
    const sql::SchemaContext schema = schema_of(c);
    std::set<std::string> allowed;
    for (const auto& n : schema.table_names()) allowed.insert(n);
    for (const auto& n : schema.column_names()) allowed.insert(n);
    const std::string& stmt = c.statements[pick(gen.rng(), c.statements.size())];
    for (const auto& n : identifiers_in(stmt)) allowed.insert(n);
    Rng rng(i);
    const auto out = apply_to_statement(OpKind::schema_aware_rename, stmt, rng, schema);
    if (!out) continue;
    ++renamed;
    for (const auto& id : identifiers_in(*out)) ASSERT_TRUE(allowed.count(id)) << stmt << " -> " << *out;
  }
  EXPECT_GT(renamed, 1000u);
}

TEST(Mutate, MutantsReparseAfterMasking) {
  testing::SqlGen gen(41);
  sql::Grammar grammar;
  for (int i = 0; i < 2000; ++i) {
    CorpusEntry e;
    e.id = "m" + std::to_string(i);
    e.test_case = gen.make_case(1 + pick(gen.rng(), 8), 0.25, e.id);
    const sql::SqlTestCase m = mutate(e, i, schema_of(e.test_case));
    const transfer::MaskedSql masked = transfer::mask_unparsable(m, grammar);
    ASSERT_TRUE(masked.parse_ok) << m.render();
    // Only fragments masked in the parent may fail to parse.
    for (const auto& r : masked.masked_regions)
      ASSERT_NE(std::find(e.test_case.statements.begin(), e.test_case.statements.end(), r.original_fragment),
                e.test_case.statements.end())
          << r.original_fragment;
  }
}

TEST(Mutate, EveryOperatorFires) {
  const CorpusEntry e = entry_of(kScript);
  const sql::SchemaContext schema = schema_of(e.test_case);
  std::set<OpKind> seen;
  for (std::uint64_t seed = 1; seed < 400; ++seed)
    for (OpKind k : mutate_with_trace(e, seed, schema).applied) seen.insert(k);
  EXPECT_EQ(seen.size(), mutation_ops().size());
}

std::vector<CorpusEntry> energies(std::vector<double> values) {
  std::vector<CorpusEntry> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back(entry_of({"SELECT 1"}, "e" + std::to_string(i)));
    out.back().energy = values[i];
  }
  return out;
}

TEST(Schedule, SingleEntry) {
  const auto corpus = energies({0.3});
  EXPECT_EQ(&schedule_next(corpus, 99), &corpus[0]);
}

TEST(Schedule, ProportionalToEnergy) {
  const auto corpus = energies({3.0, 1.0});
  Rng rng(5);
  std::size_t first = 0;
  for (int i = 0; i < 10000; ++i) first += schedule_next(corpus, rng) == 0;
  const double ratio = static_cast<double>(first) / static_cast<double>(10000 - first);
  EXPECT_NEAR(ratio, 3.0, 0.15);
}

TEST(Schedule, ZeroEnergiesFallBackToUniform) {
  const auto corpus = energies({0.0, 0.0, 0.0, 0.0});
  Rng rng(6);
  std::vector<std::size_t> hits(4);
  for (int i = 0; i < 8000; ++i) ++hits[schedule_next(corpus, rng)];
  for (std::size_t h : hits) EXPECT_NEAR(static_cast<double>(h), 2000.0, 200.0);
}

TEST(Schedule, UniformModeIgnoresEnergy) {
  const auto corpus = energies({100.0, 1.0});
  Rng rng(7);
  std::size_t first = 0;
  for (int i = 0; i < 10000; ++i) first += schedule_next(corpus, rng, Scheduling::uniform) == 0;
  EXPECT_NEAR(static_cast<double>(first), 5000.0, 250.0);
}

TEST(Schedule, EmptyCorpusThrows) {
  Rng rng(1);
  EXPECT_THROW(schedule_next({}, rng), PreconditionError);
  EXPECT_THROW(schedule_next({}, 1), PreconditionError);
}

TEST(Feedback, DisjointFingerprint) {
  const Feedback f = update_feedback(entry_of({"SELECT 1"}), {4, 5, 6}, {1, 2, 3});
  EXPECT_EQ(f.newly_covered, (std::vector<std::uint32_t>{4, 5, 6}));
  EXPECT_DOUBLE_EQ(f.entry.energy, 0.95 + 3.0);
  EXPECT_EQ(f.entry.executions, 1u);
}

TEST(Feedback, SubsetDecays) {
  CorpusEntry e = entry_of({"SELECT 1"});
  const Feedback f = update_feedback(e, {1, 2}, {1, 2, 3});
  EXPECT_TRUE(f.newly_covered.empty());
  EXPECT_DOUBLE_EQ(f.entry.energy, 0.95);
  e.energy = 0.0101;
  EXPECT_DOUBLE_EQ(update_feedback(e, {1}, {1}).entry.energy, 0.01);
}

std::unique_ptr<sql::Executor> engine_factory(std::size_t) {
  target::EngineOptions o;
  o.faults = target::FaultSet::all();
  o.hang_delay = std::chrono::microseconds(0);
  return std::make_unique<target::MiniEngine>(o);
}

std::unique_ptr<Fuzzer> make_fuzzer(std::uint64_t seed, std::uint64_t iterations) {
  FuzzConfig cfg;
  cfg.iterations = iterations;
  cfg.rng_seed = seed;
  auto f = std::make_unique<Fuzzer>(cfg, engine_factory);
  sql::SqlTestCase c;
  c.statements = kScript;
  c.dialect = "minisql";
  c.lineage_id = "seed-1";
  f->set_schema(schema_of(c));
  f->add_seed(c);
  return f;
}

TEST(Fuzzer, SingleWorkerRunsAreDeterministic) {
  auto a = make_fuzzer(3, 400);
  auto b = make_fuzzer(3, 400);
  a->run();
  b->run();
  EXPECT_EQ(a->coverage_curve(), b->coverage_curve());
  ASSERT_EQ(a->corpus().size(), b->corpus().size());
  for (std::size_t i = 0; i < a->corpus().size(); ++i) {
    EXPECT_EQ(a->corpus()[i].id, b->corpus()[i].id);
    EXPECT_EQ(a->corpus()[i].test_case.statements, b->corpus()[i].test_case.statements);
    EXPECT_EQ(a->corpus()[i].fingerprint, b->corpus()[i].fingerprint);
  }
}

TEST(Fuzzer, GlobalCoverageIsUnionOfExecutions) {
  auto f = make_fuzzer(9, 500);
  std::set<std::uint32_t> oracle;
  std::size_t calls = 0;
  f->set_observer([&](const sql::SqlTestCase&, const std::string&, const sql::ExecutionResult& r) {
    oracle.insert(r.fingerprint.begin(), r.fingerprint.end());
    ++calls;
  });
  const FuzzStats stats = f->run();
  EXPECT_EQ(f->global_seen(), oracle);
  EXPECT_EQ(stats.branch_total, oracle.size());
  EXPECT_EQ(stats.iterations, 500u);
  EXPECT_EQ(calls, 501u);  // the seed plus every mutant
}

TEST(Fuzzer, CoverageCurveIsMonotone) {
  auto f = make_fuzzer(4, 800);
  f->run();
  const auto& curve = f->coverage_curve();
  ASSERT_EQ(curve.size(), 800u);
  EXPECT_TRUE(std::is_sorted(curve.begin(), curve.end()));
  EXPECT_GT(curve.back(), curve.front());
}

TEST(Fuzzer, FingerprintFixedAfterFirstExecution) {
  auto f = make_fuzzer(8, 300);
  f->run();
  std::map<std::string, std::vector<std::uint32_t>> before;
  for (const auto& e : f->corpus()) {
    EXPECT_TRUE(e.executed);
    EXPECT_GE(e.energy, 0.0);
    before[e.id] = e.fingerprint;
  }
  FuzzConfig cfg;
  cfg.iterations = 300;
  cfg.rng_seed = 8;
  cfg.first_iteration = 300;
  Fuzzer g(cfg, engine_factory);
  for (const auto& e : f->corpus()) g.add_entry(e);
  g.run();
  for (const auto& e : g.corpus())
    if (before.count(e.id)) EXPECT_EQ(e.fingerprint, before[e.id]) << e.id;
}

TEST(Fuzzer, MultipleWorkersStayConsistent) {
  FuzzConfig cfg;
  cfg.iterations = 400;
  cfg.workers = 3;
  Fuzzer f(cfg, engine_factory);
  sql::SqlTestCase c;
  c.statements = kScript;
  c.dialect = "minisql";
  c.lineage_id = "seed-1";
  f.add_seed(c);
  std::set<std::uint32_t> oracle;
  f.set_observer([&](const sql::SqlTestCase&, const std::string&, const sql::ExecutionResult& r) {
    oracle.insert(r.fingerprint.begin(), r.fingerprint.end());
  });
  const FuzzStats stats = f.run();
  EXPECT_EQ(stats.iterations, 400u);
  EXPECT_EQ(f.global_seen(), oracle);
}

TEST(Fuzzer, EmptyCorpusThrows) {
  Fuzzer f(FuzzConfig{}, engine_factory);
  EXPECT_THROW(f.run(), PreconditionError);
}

TEST(CorpusDir, RoundTrip) {
  auto f = make_fuzzer(2, 200);
  f->run();
  testing::TempDir dir;
  save_corpus_dir(dir.str("corpus"), f->corpus());
  const auto back = load_corpus_dir(dir.str("corpus"));
  ASSERT_EQ(back.size(), f->corpus().size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    const auto& a = f->corpus()[i];
    const auto it = std::find_if(back.begin(), back.end(), [&](const CorpusEntry& e) { return e.id == a.id; });
    ASSERT_NE(it, back.end());
    EXPECT_EQ(it->test_case.statements, a.test_case.statements);
    EXPECT_EQ(it->fingerprint, a.fingerprint);
    EXPECT_DOUBLE_EQ(it->energy, a.energy);
    EXPECT_EQ(it->executions, a.executions);
    EXPECT_EQ(it->test_case.origin, a.test_case.origin);
  }
  // Saving a smaller corpus removes stale files.
  save_corpus_dir(dir.str("corpus"), {f->corpus().front()});
  EXPECT_EQ(load_corpus_dir(dir.str("corpus")).size(), 1u);
  EXPECT_TRUE(load_corpus_dir(dir.str("absent")).empty());
}

}  // namespace
}  // namespace dbfuzz::mutation
