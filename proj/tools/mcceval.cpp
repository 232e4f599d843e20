// mcceval: multi-criteria model evaluation and Borda candidate selection.
//
// Exit codes: 0 success, 1 input error, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mcc/mcc.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mcc::InputError("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void require_readable(const std::string& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw mcc::InputError("input file '" + path + "' does not exist");
}

void require_writable_target(const std::string& path) {
    if (path.empty()) return;
    auto parent = fs::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty() && !fs::is_directory(parent, ec))
        throw mcc::InputError("output directory '" + parent.string() + "' does not exist");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw mcc::InputError("cannot write file '" + path + "'");
    out << content;
}

void emit_warnings(const std::vector<std::string>& warnings, const std::string& path, bool quiet) {
    if (quiet) return;
    for (const auto& w : warnings) std::cerr << "warning: " << path << ": " << w << "\n";
}

struct EvaluateArgs {
    std::string scores, ranks, criteria, tiebreak, dot, report;
};

struct SelectArgs {
    std::string pool, spec, tiebreak_var, report, candidate;
    double fraction = 0.0;
};

struct SensitivityArgs {
    std::string scores, criteria, configs, tiebreak;
};

int run_evaluate(const EvaluateArgs& a, bool quiet) {
    if (a.scores.empty() == a.ranks.empty()) throw mcc::ConfigError("exactly one of --scores or --ranks is required");
    if (!a.scores.empty() && a.criteria.empty()) throw mcc::ConfigError("--scores requires --criteria");
    const std::string& input = a.scores.empty() ? a.ranks : a.scores;
    require_readable(input);
    if (!a.criteria.empty()) require_readable(a.criteria);
    require_writable_target(a.dot);
    require_writable_target(a.report);

    auto policy = mcc::parse_tiebreak_policy(a.tiebreak);
    std::optional<std::vector<mcc::Criterion>> criteria;
    if (!a.criteria.empty()) {
        try {
            criteria = mcc::parse_criteria_json(read_file(a.criteria));
        } catch (const mcc::InputError& e) {
            throw mcc::InputError(a.criteria + ": " + e.what());
        }
    }

    std::optional<mcc::RankMatrix> ranks;
    try {
        if (!a.scores.empty()) {
            auto parsed = mcc::parse_scores(read_file(a.scores), *criteria);
            emit_warnings(parsed.warnings, a.scores, quiet);
            ranks = mcc::quantize_matrix(parsed.scores);
        } else {
            ranks = mcc::parse_ranks(read_file(a.ranks));
            if (criteria) ranks = mcc::align_ranks(*ranks, *criteria);
        }
    } catch (const mcc::InputError& e) {
        throw mcc::InputError(input + ": " + e.what());
    }

    auto outcome = mcc::evaluate(*ranks, policy);
    auto report = mcc::render_report(outcome);
    if (!a.dot.empty()) write_file(a.dot, mcc::export_dot(outcome.dominance_graph));
    if (!a.report.empty()) write_file(a.report, report);

    std::cout << "winners: " << mcc::detail::join(outcome.winners) << "\n";
    std::cout << "decided by: " << mcc::to_string(outcome.decided_by) << "\n";
    if (a.report.empty()) std::cout << "\n" << report;
    return 0;
}

mcc::CandidatePool load_pool(const SelectArgs& a, bool quiet) {
    require_readable(a.pool);
    require_readable(a.spec);
    mcc::PoolSpec spec;
    try {
        spec = mcc::parse_pool_spec(read_file(a.spec));
    } catch (const mcc::InputError& e) {
        throw mcc::InputError(a.spec + ": " + e.what());
    }
    try {
        auto parsed = mcc::parse_pool(read_file(a.pool), spec);
        emit_warnings(parsed.warnings, a.pool, quiet);
        return std::move(parsed.pool);
    } catch (const mcc::InputError& e) {
        throw mcc::InputError(a.pool + ": " + e.what());
    }
}

std::optional<std::string> tiebreak_var(const SelectArgs& a) {
    if (a.tiebreak_var.empty()) return std::nullopt;
    return a.tiebreak_var;
}

int run_select(const SelectArgs& a, bool quiet) {
    require_writable_target(a.report);
    auto pool = load_pool(a, quiet);
    auto result = mcc::borda_select(pool, a.fraction, tiebreak_var(a));
    std::optional<mcc::AdverseImpactReport> impact;
    if (pool.has_protected_attributes()) impact = mcc::adverse_impact(pool, result.selected);
    auto report = mcc::render_report(result, impact);
    if (!a.report.empty()) write_file(a.report, report);

    std::cout << "selected (" << result.selected.size() << " of " << pool.size()
              << "): " << mcc::detail::join(result.selected) << "\n";
    if (a.report.empty()) std::cout << "\n" << report;
    return 0;
}

int run_explain(const SelectArgs& a, bool quiet) {
    auto pool = load_pool(a, quiet);
    if (!pool.candidate_index(a.candidate)) throw mcc::InputError("unknown candidate '" + a.candidate + "'");
    auto result = mcc::borda_select(pool, a.fraction, tiebreak_var(a));
    std::cout << mcc::render_explanation(mcc::explain_candidate(pool, result, a.candidate), pool.size());
    return 0;
}

int run_sensitivity(const SensitivityArgs& a, bool quiet) {
    require_readable(a.scores);
    require_readable(a.criteria);
    require_readable(a.configs);
    auto policy = mcc::parse_tiebreak_policy(a.tiebreak);
    std::vector<mcc::Criterion> criteria;
    try {
        criteria = mcc::parse_criteria_json(read_file(a.criteria));
    } catch (const mcc::InputError& e) {
        throw mcc::InputError(a.criteria + ": " + e.what());
    }
    auto configs = mcc::parse_sensitivity_configs(read_file(a.configs), criteria);
    std::optional<mcc::ScoreMatrix> scores;
    try {
        auto parsed = mcc::parse_scores(read_file(a.scores), criteria);
        emit_warnings(parsed.warnings, a.scores, quiet);
        scores = std::move(parsed.scores);
    } catch (const mcc::InputError& e) {
        throw mcc::InputError(a.scores + ": " + e.what());
    }
    std::cout << mcc::render_sensitivity(mcc::sensitivity(*scores, configs, policy));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-criteria model evaluation (Condorcet + Borda) and Borda candidate selection"};
    app.set_version_flag("--version", std::string(mcc::version));
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("--quiet", quiet, "Suppress parse warnings on stderr");

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate models: Condorcet winner, else Borda run-off, else tie-break");
    auto* ev_scores = evaluate->add_option("--scores", ev.scores, "Raw scores CSV (quantized per criteria)");
    auto* ev_ranks = evaluate->add_option("--ranks", ev.ranks, "Pre-quantized dense ranks CSV");
    ev_scores->excludes(ev_ranks);
    evaluate->add_option("--criteria", ev.criteria, "Criteria JSON");
    evaluate->add_option("--tiebreak", ev.tiebreak, "co-winners | priority:<id>[,<id>...]")->required();
    evaluate->add_option("--dot", ev.dot, "Write the dominance graph as DOT");
    evaluate->add_option("--report", ev.report, "Write the markdown report");

    SelectArgs sel;
    auto* select = app.add_subcommand("select", "Select the top fraction of candidates by Borda total");
    select->add_option("--pool", sel.pool, "Candidate pool CSV")->required();
    select->add_option("--spec", sel.spec, "Pool spec JSON (variables, protected)")->required();
    select->add_option("--fraction", sel.fraction, "Fraction of the pool to select, in (0, 1]")->required();
    select->add_option("--tiebreak-var", sel.tiebreak_var, "Variable that breaks cutoff ties");
    select->add_option("--report", sel.report, "Write the markdown report");

    SelectArgs exp;
    auto* explain = app.add_subcommand("explain", "Explain one candidate's selection outcome");
    explain->add_option("--pool", exp.pool, "Candidate pool CSV")->required();
    explain->add_option("--spec", exp.spec, "Pool spec JSON (variables, protected)")->required();
    explain->add_option("--fraction", exp.fraction, "Fraction of the pool to select, in (0, 1]")->required();
    explain->add_option("--candidate", exp.candidate, "Candidate id")->required();
    explain->add_option("--tiebreak-var", exp.tiebreak_var, "Variable that breaks cutoff ties");

    SensitivityArgs sen;
    auto* sens = app.add_subcommand("sensitivity", "Re-run the evaluation under alternative quantization modes");
    sens->add_option("--scores", sen.scores, "Raw scores CSV")->required();
    sens->add_option("--criteria", sen.criteria, "Criteria JSON")->required();
    sens->add_option("--configs", sen.configs, "Alternative mode assignments JSON")->required();
    sens->add_option("--tiebreak", sen.tiebreak, "co-winners | priority:<id>[,<id>...]")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*evaluate) return run_evaluate(ev, quiet);
        if (*select) return run_select(sel, quiet);
        if (*explain) return run_explain(exp, quiet);
        if (*sens) return run_sensitivity(sen, quiet);
    } catch (const mcc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const mcc::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
