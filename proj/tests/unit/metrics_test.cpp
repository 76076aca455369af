#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "ifdpg/metrics.hpp"
#include "ifdpg/pipeline.hpp"
#include "ifdpg/synth.hpp"

namespace ifdpg {
namespace {

const Predicate A{0, Sign::LE};
const Predicate B{1, Sign::GT};
const GraphNode kSource = GraphNode::source();
const GraphNode kIn = GraphNode::terminal(Label::Inlier);
const GraphNode kOut = GraphNode::terminal(Label::Outlier);

TEST(IopScore, Endpoints) {
  EXPECT_EQ(iop_score(5.0, 0.0, 5.0), 1.0);
  EXPECT_EQ(iop_score(0.0, 5.0, 5.0), -1.0);
  EXPECT_EQ(iop_score(2.0, 2.0, 7.0), 0.0);
  EXPECT_DOUBLE_EQ(iop_score(3.0, 1.0, 8.0), 0.25);
}

TEST(IopScore, Preconditions) {
  EXPECT_THROW(iop_score(0.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(iop_score(-1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(iop_score(1.0, 1.0, 1.0), std::invalid_argument);
  // Rounding slack is tolerated and the result clamped.
  EXPECT_EQ(iop_score(1.0 + 1e-15, 0.0, 1.0), 1.0);
}

TEST(ScoreGraph, HandTracedExample) {
  const EdgeMap edges{{{kSource, GraphNode::of(A)}, 4.0},
                      {{GraphNode::of(A), GraphNode::of(B)}, 4.0},
                      {{GraphNode::of(B), kIn}, 2.0},
                      {{GraphNode::of(B), kOut}, 2.0}};
  const IopReport r = score_graph(DpGraph(edges, ClassWeights{2.0, 2.0, 1, 1}));
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.find(A)->iop, 0.0);
  EXPECT_EQ(r.find(A)->f_in, 4.0);
  EXPECT_EQ(r.find(B)->iop, 0.0);
  EXPECT_EQ(r.find(B)->f_i, 2.0);
  EXPECT_EQ(r.find(B)->f_o, 2.0);
  // Equal scores: lower feature first.
  EXPECT_EQ(r.entries[0].predicate, A);
}

TEST(ScoreGraph, SelfLoopCountsIntoInflow) {
  const EdgeMap edges{{{kSource, GraphNode::of(A)}, 2.0},
                      {{GraphNode::of(A), GraphNode::of(A)}, 2.0},
                      {{GraphNode::of(A), kIn}, 2.0}};
  const IopReport r = score_graph(DpGraph(edges, ClassWeights{2.0, 2.0, 1, 1}));
  EXPECT_EQ(r.find(A)->f_in, 4.0);
  EXPECT_EQ(r.find(A)->iop, 0.5);
}

TEST(ScoreGraph, SumIdentity) {
  const Dataset data = fixture_dataset_two();
  ForestParams params;
  params.n_trees = 50;
  params.label_rule = Contamination{0.02};
  const Explanation e = explain(data, params);
  double sum = 0.0;
  for (const IopEntry& entry : e.report.entries) sum += entry.f_i - entry.f_o;
  const auto& g = e.graph;
  const double expected = (g.in_weight(kIn) - g.edge_weight(kSource, kIn)) -
                          (g.in_weight(kOut) - g.edge_weight(kSource, kOut));
  EXPECT_NEAR(sum, expected, 1e-9 * g.in_weight(kIn));
}

TEST(SortReport, DescendingThenFeatureThenLeBeforeGt) {
  std::vector<IopEntry> entries{{{1, Sign::GT}, 0.1}, {{1, Sign::LE}, 0.1}, {{0, Sign::GT}, 0.1}, {{2, Sign::LE}, 0.9}};
  sort_report(entries);
  EXPECT_EQ(entries[0].predicate, (Predicate{2, Sign::LE}));
  EXPECT_EQ(entries[1].predicate, (Predicate{0, Sign::GT}));
  EXPECT_EQ(entries[2].predicate, (Predicate{1, Sign::LE}));
  EXPECT_EQ(entries[3].predicate, (Predicate{1, Sign::GT}));
}

TEST(RankReport, Table) {
  EXPECT_EQ(rank_report({}, ReportFormat::Table), "Predicate | IOP-Score\n----------+----------\n");
  const IopReport one{{{{0, Sign::GT}, -0.1202}}};
  const std::string table = rank_report(one, ReportFormat::Table);
  EXPECT_EQ(table, "Predicate | IOP-Score\n----------+----------\nF0 >      |   -0.1202\n");
  const std::vector<std::string> names{"TSH"};
  EXPECT_NE(rank_report(one, ReportFormat::Table, names).find("TSH >"), std::string::npos);
}

TEST(RankReport, NoNegativeZero) {
  const IopReport tiny{{{{0, Sign::GT}, -1e-7}}};
  const std::string table = rank_report(tiny, ReportFormat::Table);
  EXPECT_EQ(table.find("-0.0000"), std::string::npos) << table;
  EXPECT_NE(table.find("0.0000"), std::string::npos);
}

TEST(RankReport, TiesPrintLeFirst) {
  IopReport r{{{{3, Sign::GT}, 0.25}, {{3, Sign::LE}, 0.25}}};
  sort_report(r.entries);
  const std::string table = rank_report(r, ReportFormat::Table);
  EXPECT_LT(table.find("F3 <="), table.find("F3 >"));
}

TEST(RankReport, Json) {
  const IopReport one{{{{0, Sign::GT}, -0.12024, 1.0, 2.0, 8.0}}};
  const auto j = nlohmann::json::parse(rank_report(one, ReportFormat::Json));
  EXPECT_EQ(j["schema_version"], 1);
  ASSERT_EQ(j["entries"].size(), 1u);
  EXPECT_EQ(j["entries"][0]["predicate"], "F0 >");
  EXPECT_DOUBLE_EQ(j["entries"][0]["iop"].get<double>(), -0.1202);
}

TEST(Explain, FixtureOneSignPattern) {
  ForestParams params;
  params.seed = 7;
  params.label_rule = Contamination{0.005};
  const Explanation e = explain(fixture_dataset_one(), params);
  for (const std::size_t f : {0u, 4u, 5u}) EXPECT_LT(e.report.find({f, Sign::GT})->iop, 0.0) << f;
  for (const std::size_t f : {1u, 2u}) {
    EXPECT_GT(e.report.find({f, Sign::GT})->iop, 0.0) << f;
    EXPECT_GT(e.report.find({f, Sign::LE})->iop, 0.0) << f;
  }
  const auto& entries = e.report.entries;
  ASSERT_GE(entries.size(), 3u);
  std::set<Predicate> bottom;
  for (std::size_t i = entries.size() - 3; i < entries.size(); ++i) bottom.insert(entries[i].predicate);
  EXPECT_EQ(bottom, (std::set<Predicate>{{0, Sign::GT}, {4, Sign::GT}, {5, Sign::GT}}));
}

TEST(Explain, IopBoundedAndScaleInvariant) {
  ForestParams params;
  params.n_trees = 40;
  params.label_rule = Contamination{0.02};
  const Explanation e = explain(fixture_dataset_two(), params);
  EdgeMap scaled;
  for (const auto& [key, w] : e.graph.edges()) scaled[key] = w * 0.37;
  const IopReport r = score_graph(DpGraph(scaled, e.graph.weights()));
  for (const IopEntry& entry : e.report.entries) {
    EXPECT_GE(entry.iop, -1.0);
    EXPECT_LE(entry.iop, 1.0);
    EXPECT_NEAR(r.find(entry.predicate)->iop, entry.iop, 1e-12);
  }
}

}  // namespace
}  // namespace ifdpg
