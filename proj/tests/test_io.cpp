#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "mcc/mcc.hpp"
#include "support/competitions.hpp"
#include "support/random.hpp"

using namespace mcc;

namespace {

std::string fixture(const std::string& name) {
    std::ifstream in(std::string(MCC_FIXTURES) + "/" + name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<Criterion> lower_ordinal(int n) {
    std::vector<Criterion> out;
    for (int i = 1; i <= n; ++i) {
        std::string id = "C" + std::to_string(i);
        out.push_back({id, id, Category::Custom, Direction::LowerIsBetter, Ordinal{}});
    }
    return out;
}

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

} // namespace

TEST(Csv, QuotesCrlfAndBlankLines) {
    auto rows = parse_csv("a,b\r\n\"x, y\",\"he said \"\"hi\"\"\"\r\n\r\n  z  ,2\n");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1].cells, (std::vector<std::string>{"x, y", "he said \"hi\""}));
    EXPECT_EQ(rows[2].cells, (std::vector<std::string>{"z", "2"}));
    EXPECT_EQ(rows[2].line, 4u);
    EXPECT_THROW(parse_csv("a,\"b\n"), InputError);
}

TEST(ParseScores, CompetitionRanksAsRawScoresQuantizeBack) {
    auto parsed = parse_scores(fixture("competition1_ranks.csv"), lower_ordinal(5));
    EXPECT_TRUE(parsed.warnings.empty());
    EXPECT_EQ(quantize_matrix(parsed.scores), test::competition1());
}

TEST(ParseScores, RawScoreFixturesWithDeclaredCriteria) {
    auto criteria = parse_criteria_json(fixture("competition_criteria.json"));
    auto c1 = parse_scores(fixture("competition1_scores.csv"), criteria);
    EXPECT_EQ(quantize_matrix(c1.scores), test::competition1());
    ASSERT_EQ(c1.warnings.size(), 1u);
    EXPECT_NE(c1.warnings[0].find("notes"), std::string::npos);
    auto c2 = parse_scores(fixture("competition2_scores.csv"), criteria);
    EXPECT_EQ(quantize_matrix(c2.scores), test::competition2());
}

TEST(ParseScores, CriteriaOrderComesFromCriteriaList) {
    auto crit = lower_ordinal(2);
    std::swap(crit[0], crit[1]);
    auto parsed = parse_scores("model_id,C1,C2\na,1,5\nb,2,4\n", crit);
    EXPECT_EQ(parsed.scores.criteria()[0].id, "C2");
    EXPECT_EQ(parsed.scores.at(0, 0), 5.0);
}

TEST(ParseScores, Errors) {
    auto crit = lower_ordinal(2);
    EXPECT_EQ(error_of([&] { parse_scores("model_id,C1,C2\n", crit); }), "no models");
    EXPECT_EQ(error_of([&] { parse_scores("", crit); }), "empty scores file: no header row");
    EXPECT_NE(error_of([&] { parse_scores("model_id,C1\na,1\n", crit); }).find("missing column for criterion 'C2'"),
              std::string::npos);
    EXPECT_NE(error_of([&] { parse_scores("model_id,C1,C2\na,1,2\na,2,1\n", crit); }).find("row 3: duplicate model id 'a'"),
              std::string::npos);
    EXPECT_NE(error_of([&] { parse_scores("model_id,C1,C2\na,1,2\nb,x1,1\n", crit); })
                  .find("row 3, column 2 ('C1'): cannot parse 'x1'"),
              std::string::npos);
    EXPECT_NE(error_of([&] { parse_scores("model_id,C1,C2\na,1\n", crit); }).find("expected 3 cells"), std::string::npos);
    EXPECT_NE(error_of([&] { parse_scores("model_id,C1,C2\na,nan,1\n", crit); }).find("non-finite"), std::string::npos);
}

TEST(ParseRanks, CompetitionTablesVerbatim) {
    EXPECT_EQ(parse_ranks(fixture("competition2_ranks.csv")), test::competition2());
    EXPECT_EQ(parse_ranks("model_id,C1,C2\nsolo,1,1\n").model_count(), 1u);
}

TEST(ParseRanks, NonDenseColumnNamed) {
    EXPECT_EQ(error_of([] { parse_ranks("model_id,C1,C2\na,1,1\nb,3,1\n"); }), "non-dense column 'C1'");
    EXPECT_NE(error_of([] { parse_ranks("model_id,C1\na,1.5\nb,1\n"); }).find("integer rank"), std::string::npos);
    EXPECT_NE(error_of([] { parse_ranks("model_id,C1\na,0\nb,1\n"); }).find("ranks start at 1"), std::string::npos);
}

TEST(ParseRanks, CsvRoundTrip) {
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(test::uniform_int(1, 6));
        const auto k = static_cast<std::size_t>(test::uniform_int(1, 4));
        std::vector<std::string> models, crits;
        for (std::size_t i = 0; i < n; ++i) models.push_back(i % 2 ? "m, \"" + std::to_string(i) + "\"" : "m" + std::to_string(i));
        for (std::size_t i = 0; i < k; ++i) crits.push_back("crit " + std::to_string(i));
        RankMatrix r(models, crits, test::random_dense_ranks(n, k, 3));
        ASSERT_EQ(parse_ranks(ranks_to_csv(r)), r);
    }
}

TEST(AlignRanks, ReordersAndRejectsMismatch) {
    auto crit = lower_ordinal(2);
    std::swap(crit[0], crit[1]);
    auto r = align_ranks(parse_ranks("model_id,C1,C2\na,1,2\nb,2,1\n"), crit);
    EXPECT_EQ(r.criterion_ids(), (std::vector<std::string>{"C2", "C1"}));
    EXPECT_EQ(r.at(0, 0), 2);
    EXPECT_THROW(align_ranks(parse_ranks("model_id,C1\na,1\n"), crit), InputError);
    EXPECT_THROW(align_ranks(parse_ranks("model_id,C1,C2,C3\na,1,1,1\n"), crit), InputError);
}

TEST(CriteriaJson, ParsesAllModes) {
    auto c = parse_criteria_json(R"([
      {"id":"a","display_name":"A","category":"ethical","direction":"lower_is_better","mode":{"kind":"binned","edges":[0.01,0.03,0.05]}},
      {"id":"b","direction":"higher_is_better","mode":{"kind":"threshold","value":0.5}},
      {"id":"c","direction":"lower_is_better","mode":{"kind":"ordinal"}}])");
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0].category, Category::Ethical);
    EXPECT_EQ(std::get<Binned>(c[0].mode).edges, (std::vector<double>{0.01, 0.03, 0.05}));
    EXPECT_EQ(c[1].display_name, "b");
    EXPECT_EQ(c[1].category, Category::Custom);
    EXPECT_EQ(std::get<BinaryThreshold>(c[1].mode).threshold, 0.5);
    EXPECT_TRUE(std::holds_alternative<Ordinal>(c[2].mode));
}

TEST(CriteriaJson, Errors) {
    EXPECT_THROW(parse_criteria_json("{"), InputError);
    EXPECT_THROW(parse_criteria_json("{}"), InputError);
    EXPECT_THROW(parse_criteria_json("[]"), InputError);
    EXPECT_THROW(parse_criteria_json(R"([{"id":"a","direction":"up","mode":{"kind":"ordinal"}}])"), InputError);
    EXPECT_THROW(parse_criteria_json(R"([{"id":"a","direction":"lower_is_better","mode":{"kind":"fuzzy"}}])"), InputError);
    EXPECT_THROW(parse_criteria_json(R"([{"id":"a","direction":"lower_is_better","mode":{"kind":"binned","edges":[2,1]}}])"),
                 InputError);
    EXPECT_THROW(parse_criteria_json(R"([{"id":"a","direction":"lower_is_better","category":"astrology","mode":{"kind":"ordinal"}}])"),
                 InputError);
    auto dup = error_of([] {
        parse_criteria_json(R"([{"id":"a","direction":"lower_is_better","mode":{"kind":"ordinal"}},
                                {"id":"a","direction":"lower_is_better","mode":{"kind":"ordinal"}}])");
    });
    EXPECT_NE(dup.find("criteria entry 1"), std::string::npos);
}

TEST(SensitivityConfigs, ParseAndValidate) {
    auto crit = parse_criteria_json(fixture("flip_criteria.json"));
    auto cfg = parse_sensitivity_configs(fixture("flip_configs.json"), crit);
    ASSERT_EQ(cfg.size(), 2u);
    EXPECT_EQ(cfg[1].label, "A-threshold");
    EXPECT_EQ(std::get<BinaryThreshold>(cfg[1].modes[0]).threshold, 1.5);
    EXPECT_THROW(parse_sensitivity_configs(fixture("empty_configs.json"), crit), ConfigError);
    EXPECT_THROW(parse_sensitivity_configs(R"([{"modes":{"A":{"kind":"ordinal"}}}])", crit), ConfigError);
    EXPECT_THROW(parse_sensitivity_configs(R"([{"modes":{"A":{"kind":"ordinal"},"B":{"kind":"ordinal"},"Z":{"kind":"ordinal"}}}])", crit),
                 ConfigError);
    EXPECT_THROW(parse_sensitivity_configs("nope", crit), ConfigError);
}

TEST(Pool, ParseWithProtectedAttributes) {
    auto spec = parse_pool_spec(fixture("pool_tie6_spec.json"));
    auto parsed = parse_pool(fixture("pool_tie6.csv"), spec);
    EXPECT_TRUE(parsed.warnings.empty());
    EXPECT_EQ(parsed.pool.size(), 6u);
    EXPECT_EQ(parsed.pool.attributes(), (std::vector<std::string>{"gender", "race"}));
    EXPECT_EQ(parsed.pool.label(3, 0), "F");
    EXPECT_EQ(parsed.pool.value(2, 1), 6.0);
}

TEST(Pool, Errors) {
    auto spec = parse_pool_spec(fixture("pool_tie6_spec.json"));
    EXPECT_NE(error_of([&] { parse_pool("id,x,y,gender\na,1,1,F\nb,2,2,M\n", spec); }).find("protected attribute 'race'"),
              std::string::npos);
    EXPECT_NE(error_of([&] { parse_pool("id,x,y,gender,race\na,1,1,F,\nb,2,2,M,A\n", spec); }).find("missing protected"),
              std::string::npos);
    EXPECT_EQ(error_of([&] { parse_pool("id,x,y,gender,race\n", spec); }), "no candidates");
    EXPECT_THROW(parse_pool_spec(R"({"variables": []})"), InputError);
    EXPECT_THROW(parse_pool_spec(R"({"variables": [{"name":"x","direction":"sideways"}]})"), InputError);
    auto extra = parse_pool("id,test,interview,reference,notes\na,1,1,1,n\nb,2,2,2,m\n", parse_pool_spec(fixture("pool4_spec.json")));
    ASSERT_EQ(extra.warnings.size(), 1u);
}

TEST(Dot, CompetitionOneEdgesOutOfModelTwo) {
    auto dot = export_dot(build_dominance_graph(test::competition1()));
    for (const auto& m : test::kModels) {
        if (m == "Model 2") continue;
        EXPECT_NE(dot.find("\"Model 2\" -> \"" + m + "\";"), std::string::npos) << m;
        EXPECT_EQ(dot.find("\"" + m + "\" -> \"Model 2\""), std::string::npos) << m;
    }
    EXPECT_EQ(count_of(dot, "\"Model 2\" -> "), 4u);
    EXPECT_EQ(dot.find("dir=both"), std::string::npos);
}

TEST(Dot, CompetitionTwoTieEdge) {
    auto dot = export_dot(build_dominance_graph(test::competition2()));
    EXPECT_NE(dot.find("\"Model 2\" -> \"Model 3\" [dir=both];"), std::string::npos);
    EXPECT_EQ(count_of(dot, "dir=both"), 1u);
}

TEST(Dot, SingleNode) {
    EXPECT_EQ(export_dot(build_dominance_graph(RankMatrix({"solo"}, {"c"}, {1}))),
              "digraph dominance {\n  \"solo\";\n}\n");
}

TEST(Dot, WellFormedAndComplete) {
    const std::regex node(R"re(  "(?:[^"\\]|\\.)*";)re");
    const std::regex edge(R"re(  "(?:[^"\\]|\\.)*" -> "(?:[^"\\]|\\.)*"( \[dir=both\])?;)re");
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(test::uniform_int(1, 6));
        const auto k = static_cast<std::size_t>(test::uniform_int(1, 4));
        std::vector<std::string> models, crits;
        for (std::size_t i = 0; i < n; ++i) models.push_back("m\"" + std::to_string(i));
        for (std::size_t i = 0; i < k; ++i) crits.push_back("c" + std::to_string(i));
        auto dot = export_dot(build_dominance_graph(RankMatrix(models, crits, test::random_dense_ranks(n, k, 3))));
        std::istringstream in(dot);
        std::string line;
        std::getline(in, line);
        ASSERT_EQ(line, "digraph dominance {");
        std::size_t nodes = 0, edges = 0;
        bool closed = false;
        while (std::getline(in, line)) {
            if (line == "}") {
                closed = true;
                continue;
            }
            ASSERT_FALSE(closed);
            if (std::regex_match(line, edge)) ++edges;
            else if (std::regex_match(line, node)) ++nodes;
            else FAIL() << line;
        }
        ASSERT_TRUE(closed);
        ASSERT_EQ(nodes, n);
        ASSERT_EQ(edges, n * (n - 1) / 2);
        ASSERT_EQ(dot.find('\r'), std::string::npos);
    }
}

TEST(Report, CondorcetOutcome) {
    auto out = evaluate(test::competition1(), AllowCoWinners{});
    auto md = render_report(out);
    EXPECT_NE(md.find("decided by: condorcet"), std::string::npos);
    EXPECT_NE(md.find("winners: Model 2\n"), std::string::npos);
    EXPECT_NE(md.find("Not computed"), std::string::npos);
    EXPECT_NE(md.find("[condorcet] Model 2 dominates all 4 other models"), std::string::npos);
}

TEST(Report, CoWinnersOutcome) {
    auto md = render_report(evaluate(test::competition2(), AllowCoWinners{}));
    EXPECT_NE(md.find("winners: Model 2, Model 3\n"), std::string::npos);
    EXPECT_NE(md.find("decided by: co_winners"), std::string::npos);
    EXPECT_NE(md.find("| Model 2 | 4 | 3 | 4 | 4 | 4 | 19 |"), std::string::npos);
    EXPECT_NE(md.find("[tiebreak] co-winners accepted by policy"), std::string::npos);
}

TEST(Report, Deterministic) {
    auto a = render_report(evaluate(test::competition2(), PriorityCriteria{{"C1"}}));
    auto b = render_report(evaluate(test::competition2(), PriorityCriteria{{"C1"}}));
    EXPECT_EQ(a, b);
    EXPECT_NE(a.find("[tiebreak] criterion C1: best rank 1; eliminated Model 3 (rank 2)"), std::string::npos);
}

TEST(Report, BordaRowsMirrorTheTable) {
    auto out = evaluate(test::competition2(), AllowCoWinners{});
    auto md = render_report(out);
    const auto& t = *out.borda_table;
    for (std::size_t m = 0; m < t.model_ids.size(); ++m) {
        std::string row = "| " + t.model_ids[m] + " |";
        for (std::size_t c = 0; c < t.criterion_ids.size(); ++c) row += " " + std::to_string(t.points_at(m, c)) + " |";
        row += " " + std::to_string(t.totals[m]) + " |";
        EXPECT_NE(md.find(row), std::string::npos) << row;
    }
}

TEST(Report, SelectionWithAdverseImpact) {
    auto parsed = parse_pool(fixture("pool_tie6.csv"), parse_pool_spec(fixture("pool_tie6_spec.json")));
    auto res = borda_select(parsed.pool, 0.5, "y");
    auto impact = adverse_impact(parsed.pool, res.selected);
    auto md = render_report(res, impact);
    EXPECT_NE(md.find("## Adverse impact"), std::string::npos);
    for (const auto& r : impact.rows) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", r.delta == 0.0 ? 0.0 : r.delta);
        EXPECT_NE(md.find("| " + r.attribute + " | " + r.category + " | " + std::to_string(r.pool_count) + " | " +
                          std::to_string(r.selected_count)),
                  std::string::npos);
        EXPECT_NE(md.find(buf), std::string::npos);
    }
    EXPECT_NE(md.find("1. c1\n2. c2\n3. c4\n"), std::string::npos);
    EXPECT_EQ(md.find("stand-in"), std::string::npos);

    std::map<std::string, bool> success;
    for (const auto& id : parsed.pool.candidate_ids()) success[id] = id < "c4";
    auto md2 = render_report(res, impact, combined_metric_standin(parsed.pool, res, impact, success));
    EXPECT_NE(md2.find("Combined metric (stand-in)"), std::string::npos);
}

TEST(Report, Explanation) {
    auto parsed = parse_pool(fixture("pool_tie6.csv"), parse_pool_spec(fixture("pool_tie6_spec.json")));
    auto res = borda_select(parsed.pool, 0.5, "y");
    auto text = render_explanation(explain_candidate(parsed.pool, res, "c3"), parsed.pool.size());
    EXPECT_NE(text.find("status: not selected"), std::string::npos);
    EXPECT_NE(text.find("tie-break variable 'y'"), std::string::npos);
    EXPECT_NE(text.find("| x | 3 | 3 |"), std::string::npos);
}

TEST(Report, SensitivityTableFlagsChanges) {
    auto crit = parse_criteria_json(fixture("flip_criteria.json"));
    auto scores = parse_scores(fixture("flip_scores.csv"), crit).scores;
    auto rows = sensitivity(scores, parse_sensitivity_configs(fixture("flip_configs.json"), crit), AllowCoWinners{});
    auto table = render_sensitivity(rows);
    EXPECT_NE(table.find("| ordinal | M1 | borda |  |"), std::string::npos);
    EXPECT_NE(table.find("| A-threshold | M1, M3 | co_winners | * |"), std::string::npos);
}
