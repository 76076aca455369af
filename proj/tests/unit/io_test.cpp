#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "ifdpg/error.hpp"
#include "ifdpg/io/bundle.hpp"
#include "ifdpg/io/csv.hpp"
#include "ifdpg/io/dot.hpp"
#include "ifdpg/io/json.hpp"
#include "ifdpg/pipeline.hpp"
#include "ifdpg/synth.hpp"
#include "oracle.hpp"

namespace ifdpg::io {
namespace {

using testing::TempDir;

std::string message_of(const std::string& text, const CsvOptions& options = {}) {
  try {
    parse_csv(text, options, "in.csv");
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST(Csv, HeaderlessGetsDefaultNames) {
  const Dataset d = parse_csv("1,2\n3,4\n");
  EXPECT_EQ(d.feature_names(), (std::vector<std::string>{"f0", "f1"}));
  EXPECT_FALSE(d.has_named_features());
  EXPECT_EQ(d.at(1, 0), 3.0);
}

TEST(Csv, HeaderLabelsAndQuoting) {
  const Dataset d = parse_csv(
      "\xEF\xBB\xBF" "Age,\"TSH, mU/l\",class\r\n0.5,1e-3,n\r\n0.25,-2,O\r\n\r\n0.75,+3,inlier\r\n",
      {.label_column = "class"});
  EXPECT_EQ(d.feature_names(), (std::vector<std::string>{"Age", "TSH, mU/l"}));
  EXPECT_TRUE(d.has_named_features());
  EXPECT_EQ(d.n_samples(), 3u);
  EXPECT_EQ(*d.labels(), (std::vector<Label>{Label::Inlier, Label::Outlier, Label::Inlier}));
  EXPECT_EQ(d.at(2, 1), 3.0);
}

TEST(Csv, LabelColumnByIndexAndNumericTokens) {
  const Dataset d = parse_csv("1,2,0\n3,4,1\n", {.label_column = "2"});
  EXPECT_EQ(d.n_features(), 2u);
  EXPECT_EQ(*d.labels(), (std::vector<Label>{Label::Inlier, Label::Outlier}));
}

TEST(Csv, NonNumericColumnsAreDropped) {
  const Dataset d = parse_csv("id,x,y\na,1,2\nb,3,4\n");
  EXPECT_EQ(d.feature_names(), (std::vector<std::string>{"x", "y"}));
}

TEST(Csv, ExplicitNoHeaderTreatsFirstRowAsData) {
  EXPECT_EQ(parse_csv("1,2\n3,4\n", {.has_header = false}).n_samples(), 2u);
  EXPECT_NE(message_of("x,y\n1,2\n3,4\n", {.has_header = false}).find("no numeric columns"), std::string::npos);
  EXPECT_NE(message_of("1,2\n3,x\n", {.has_header = false}).find("line 2, column 'f1': cannot parse 'x'"),
            std::string::npos);
}

TEST(Csv, Errors) {
  EXPECT_NE(message_of("").find("empty file"), std::string::npos);
  EXPECT_NE(message_of("a,b\n").find("no data rows"), std::string::npos);
  EXPECT_NE(message_of("1,2\n3\n").find("in.csv:2: row has 1 fields, expected 2"), std::string::npos);
  EXPECT_NE(message_of("a,b\nx,y\nz,w\n").find("no numeric columns"), std::string::npos);
  const std::string bad = message_of("x,y\n1,2\n3,inf\n4,nan\n5,zz\n");
  EXPECT_NE(bad.find("line 3, column 'y': non-finite value 'inf'"), std::string::npos) << bad;
  EXPECT_NE(bad.find("line 4, column 'y': non-finite"), std::string::npos) << bad;
  EXPECT_NE(bad.find("line 5, column 'y': cannot parse 'zz'"), std::string::npos) << bad;
  EXPECT_NE(message_of("x,l\n1,n\n2,maybe\n", {.label_column = "l"}).find("unknown label token 'maybe'"),
            std::string::npos);
  EXPECT_NE(message_of("x,l\n1,n\n", {.label_column = "nope"}).find("unknown label column"), std::string::npos);
  EXPECT_NE(message_of("1,\"2\n").find("unterminated"), std::string::npos);
  EXPECT_NE(message_of("1\n").find("in.csv"), std::string::npos);
  EXPECT_THROW(read_csv("/nonexistent/file.csv"), InputError);
}

TEST(Csv, RoundTripIsExact) {
  const SynthResult r = generate(fixture_config_two());
  std::ostringstream out;
  write_csv(r.data, out);
  const Dataset back = parse_csv(out.str(), {.label_column = "label"});
  ASSERT_EQ(back.n_samples(), r.data.n_samples());
  for (std::size_t i = 0; i < back.values().size(); ++i) EXPECT_EQ(back.values()[i], r.data.values()[i]);
  EXPECT_EQ(back.feature_names(), r.data.feature_names());
  EXPECT_EQ(*back.labels(), *r.data.labels());
}

TEST(Csv, FormatDoubleShortestRoundTrip) {
  for (const double v : {0.1, -2.5e-300, 1.0 / 3.0, 123456789.125, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Csv, InjectionLogColumns) {
  const SynthResult r = generate(fixture_config_one());
  std::ostringstream out;
  write_injection_log(r.log, out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "sample,feature,initial,final,alteration,sigma,factor");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

Explanation small_explanation(std::uint64_t seed = 3) {
  ForestParams params;
  params.n_trees = 30;
  params.seed = seed;
  params.label_rule = Contamination{0.02};
  return explain(fixture_dataset_two(), params);
}

TEST(Json, ModelRoundTrip) {
  const Explanation e = small_explanation();
  const ForestModel back = model_from_json(nlohmann::json::parse(dump(model_to_json(e.model))));
  EXPECT_EQ(back.trees, e.model.trees);
  EXPECT_EQ(back.scores, e.model.scores);
  EXPECT_EQ(back.labels, e.model.labels);
  EXPECT_EQ(back.subsample_size, e.model.subsample_size);
  EXPECT_EQ(back.params.seed, 3u);
  EXPECT_EQ(score_samples(back, fixture_dataset_two()), e.model.scores);
}

TEST(Json, GraphRoundTrip) {
  const Explanation e = small_explanation();
  const nlohmann::json j = graph_to_json(e.graph, e.report);
  const DpGraph back = graph_from_json(nlohmann::json::parse(dump(j)));
  EXPECT_EQ(back.edges(), e.graph.edges());
  EXPECT_EQ(back.weights().w_o, e.graph.weights().w_o);
  EXPECT_EQ(back.metadata().pruned_outlier_traces, e.graph.metadata().pruned_outlier_traces);
  EXPECT_EQ(j["schema_version"], 1);
  for (const auto& node : j["nodes"]) {
    if (node["kind"] == "predicate") {
      EXPECT_TRUE(node["iop"].is_number());
      EXPECT_TRUE(node["sign"] == "LE" || node["sign"] == "GT");
    } else {
      EXPECT_TRUE(node["iop"].is_null());
    }
  }
}

TEST(Json, RejectsBadDocuments) {
  EXPECT_THROW(model_from_json(nlohmann::json{{"schema_version", 2}}), InputError);
  EXPECT_THROW(model_from_json(nlohmann::json::object()), InputError);
  nlohmann::json j = model_to_json(small_explanation().model);
  j["scores"][0] = 1.5;
  EXPECT_THROW(model_from_json(j), InputError);
  j = model_to_json(small_explanation().model);
  j["trees"].erase(0);
  EXPECT_THROW(model_from_json(j), InputError);
  j = model_to_json(small_explanation().model);
  j["params"]["label_rule"]["kind"] = "vote";
  EXPECT_THROW(model_from_json(j), InputError);
}

TEST(Dot, MinimalGraph) {
  const Predicate a{0, Sign::LE};
  const DpGraph g({{{GraphNode::of(a), GraphNode::terminal(Label::Inlier)}, 2.0}}, ClassWeights{2, 2, 1, 1});
  const IopReport r{{{a, 1.0, 2.0, 0.0, 2.0}}};
  const std::string dot = export_dot(g, r);
  EXPECT_TRUE(dot.starts_with("digraph DPG {\n"));
  EXPECT_TRUE(dot.ends_with("}\n"));
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '\r'), 0);
  const std::regex node_line(R"(^  "[A-Z0-9_]+" \[label=)");
  const std::regex edge_line(R"(^  "[A-Z0-9_]+" -> )");
  int nodes = 0, edges = 0;
  std::istringstream lines(dot);
  for (std::string line; std::getline(lines, line);) {
    nodes += std::regex_search(line, node_line) && line.find("->") == std::string::npos;
    edges += std::regex_search(line, edge_line);
  }
  EXPECT_EQ(nodes, 2);
  EXPECT_EQ(edges, 1);
  EXPECT_NE(dot.find("\"F0_LE\" [label=\"F0 <=\", shape=ellipse, fillcolor=\"" + std::string(kIopPalette[10])),
            std::string::npos)
      << dot;
  EXPECT_NE(dot.find("penwidth=6.000"), std::string::npos);
}

TEST(Dot, PaletteAndPenWidth) {
  EXPECT_EQ(iop_color(0.0), "#f7f7f7");
  EXPECT_EQ(iop_color(-1.0), "#67001f");
  EXPECT_EQ(iop_color(1.0), "#053061");
  EXPECT_EQ(iop_color(-7.0), iop_color(-1.0));
  const DotStyle style;
  EXPECT_EQ(pen_width(1.0, 1.0, 3.0, style), 0.5);
  EXPECT_EQ(pen_width(3.0, 1.0, 3.0, style), 6.0);
  EXPECT_EQ(pen_width(2.0, 1.0, 3.0, style), 3.25);
  EXPECT_EQ(pen_width(2.0, 2.0, 2.0, style), 6.0);
}

TEST(Dot, NamesSourceAndMismatch) {
  const Explanation e = small_explanation();
  const std::string dot = export_dot(e.graph, e.report);
  EXPECT_EQ(dot.find("SOURCE"), std::string::npos);
  EXPECT_NE(dot.find("\"OUTLIER\" [label=\"Outlier\", shape=box"), std::string::npos);
  DotStyle style;
  style.show_source = true;
  EXPECT_NE(export_dot(e.graph, e.report, style).find("\"SOURCE\" ->"), std::string::npos);
  EXPECT_EQ(export_dot(e.graph, e.report), dot);
  IopReport partial = e.report;
  partial.entries.pop_back();
  EXPECT_THROW(export_dot(e.graph, partial), std::invalid_argument);

  GraphMetadata meta = e.graph.metadata();
  meta.feature_names = {"Age", "TSH", "T3", "TT4", "T4U", "FTI"};
  meta.named_features = true;
  const DpGraph named(e.graph.edges(), e.graph.weights(), meta);
  EXPECT_NE(export_dot(named, e.report).find("label=\"TSH >\""), std::string::npos);
}

TEST(Bundle, WritesSixFilesWithManifest) {
  TempDir dir;
  const Explanation e = small_explanation(7);
  BundleInfo info{sha256_hex("abc"), "data.csv", {}};
  const auto manifest = write_explanation_bundle(dir.path() / "out", e.model, e.graph, e.report, info);
  for (const char* name : {"model.json", "graph.json", "iop_report.json", "graph.dot", "iop_table.txt", "manifest.json"})
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "out" / name)) << name;
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_EQ(manifest["input"]["sha256"], "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(manifest["files"]["graph.json"], sha256_hex(testing::read_file(dir.path() / "out" / "graph.json")));
  EXPECT_EQ(nlohmann::json::parse(testing::read_file(dir.path() / "out" / "manifest.json")), manifest);
}

TEST(Bundle, SameInputsSameBytes) {
  TempDir dir;
  for (const char* name : {"a", "b"}) {
    const Explanation e = small_explanation(5);
    write_explanation_bundle(dir.path() / name, e.model, e.graph, e.report, {"h", "d.csv", {}});
  }
  for (const char* file : {"model.json", "graph.json", "iop_report.json", "graph.dot", "iop_table.txt", "manifest.json"})
    EXPECT_EQ(testing::read_file(dir.path() / "a" / file), testing::read_file(dir.path() / "b" / file)) << file;
}

TEST(Bundle, UnwritableDirectoryIsNamed) {
  TempDir dir;
  // A directory cannot be created beneath a regular file, even as root.
  std::ofstream(dir.path() / "blocker") << "x";
  const auto target = dir.path() / "blocker" / "out";
  const Explanation e = small_explanation();
  try {
    write_explanation_bundle(target, e.model, e.graph, e.report, {});
    FAIL() << "expected InputError";
  } catch (const InputError& err) {
    EXPECT_NE(std::string(err.what()).find(target.string()), std::string::npos) << err.what();
  }
}

TEST(Bundle, Sha256File) {
  TempDir dir;
  std::ofstream(dir.path() / "f") << "abc";
  EXPECT_EQ(sha256_file(dir.path() / "f"), sha256_hex("abc"));
  EXPECT_THROW(sha256_file(dir.path() / "missing"), InputError);
}

}  // namespace
}  // namespace ifdpg::io
