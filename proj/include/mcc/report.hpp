#pragma once

// DOT export of dominance graphs and markdown rendering of outcomes. Renderers
// only format values already held by the outcome objects.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "mcc/selection.hpp"
#include "mcc/tournament.hpp"

namespace mcc {

namespace detail {

inline std::string dot_id(std::string_view id) {
    std::string out = "\"";
    for (char c : id) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v == 0.0 ? 0.0 : v);
    return buf;
}

inline std::string md_cell(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += '\\';
        out += c;
    }
    return out;
}

inline void md_row(std::string& out, const std::vector<std::string>& cells) {
    out += "|";
    for (const auto& c : cells) out += " " + md_cell(c) + " |";
    out += "\n";
}

inline void md_header(std::string& out, const std::vector<std::string>& cells) {
    md_row(out, cells);
    out += "|";
    for (std::size_t i = 0; i < cells.size(); ++i) out += "---|";
    out += "\n";
}

} // namespace detail

/// Nodes and edges sorted by model id; tie edges are emitted once as
/// `lo -> hi [dir=both]`.
inline std::string export_dot(const DominanceGraph& graph) {
    auto nodes = graph.nodes;
    std::sort(nodes.begin(), nodes.end());
    std::vector<std::tuple<std::string, std::string, bool>> edges;
    for (const auto& e : graph.edges) edges.emplace_back(e.winner, e.loser, false);
    for (const auto& t : graph.tie_edges) edges.emplace_back(std::min(t.first, t.second), std::max(t.first, t.second), true);
    std::sort(edges.begin(), edges.end());

    std::string out = "digraph dominance {\n";
    for (const auto& n : nodes) out += "  " + detail::dot_id(n) + ";\n";
    for (const auto& [from, to, tie] : edges) {
        out += "  " + detail::dot_id(from) + " -> " + detail::dot_id(to);
        out += tie ? " [dir=both];\n" : ";\n";
    }
    out += "}\n";
    return out;
}

inline std::string render_report(const EvaluationOutcome& outcome) {
    const auto& ranks = outcome.ranks;
    std::string out = "# Evaluation report\n\n";
    out += "- winners: " + detail::join(outcome.winners) + "\n";
    out += "- decided by: " + std::string(to_string(outcome.decided_by)) + "\n";
    out += "- tie-break policy: " + to_string(outcome.policy) + "\n";
    out += "- models: " + std::to_string(ranks.model_count()) + ", criteria: " + std::to_string(ranks.criterion_count()) + "\n";

    out += "\n## Ranks per criterion\n\n";
    std::vector<std::string> head{"model"};
    head.insert(head.end(), ranks.criterion_ids().begin(), ranks.criterion_ids().end());
    detail::md_header(out, head);
    for (std::size_t m = 0; m < ranks.model_count(); ++m) {
        std::vector<std::string> row{ranks.model_ids()[m]};
        for (int r : ranks.row(m)) row.push_back(std::to_string(r));
        detail::md_row(out, row);
    }

    out += "\n## Pairwise comparisons\n\n";
    detail::md_header(out, {"model A", "model B", "wins A", "wins B", "ties", "relation"});
    for (const auto& p : outcome.dominance_graph.pairs) {
        std::string rel = p.a_dominates() ? p.model_a + " -> " + p.model_b
                          : p.b_dominates() ? p.model_b + " -> " + p.model_a
                                            : "tie";
        detail::md_row(out, {p.model_a, p.model_b, std::to_string(p.wins_a), std::to_string(p.wins_b),
                             std::to_string(p.ties), rel});
    }

    out += "\n## Borda run-off\n\n";
    if (outcome.borda_table) {
        const auto& t = *outcome.borda_table;
        std::vector<std::string> bhead{"model"};
        bhead.insert(bhead.end(), t.criterion_ids.begin(), t.criterion_ids.end());
        bhead.push_back("total");
        detail::md_header(out, bhead);
        for (std::size_t m = 0; m < t.model_ids.size(); ++m) {
            std::vector<std::string> row{t.model_ids[m]};
            for (std::size_t c = 0; c < t.criterion_ids.size(); ++c) row.push_back(std::to_string(t.points_at(m, c)));
            row.push_back(std::to_string(t.totals[m]));
            detail::md_row(out, row);
        }
    } else {
        out += "Not computed: a Condorcet winner decided the evaluation.\n";
    }

    out += "\n## Audit trail\n\n";
    for (std::size_t i = 0; i < outcome.audit.size(); ++i)
        out += std::to_string(i + 1) + ". [" + outcome.audit[i].stage + "] " + outcome.audit[i].detail + "\n";
    return out;
}

inline std::string render_report(const SelectionResult& result, const std::optional<AdverseImpactReport>& impact = std::nullopt,
                                 const std::optional<CombinedMetricStandIn>& combined = std::nullopt) {
    std::string out = "# Selection report\n\n";
    out += "- fraction requested: " + detail::fixed6(result.fraction_requested) + "\n";
    out += "- pool size: " + std::to_string(result.order.size()) + ", selected: " + std::to_string(result.selected.size()) + "\n";
    out += "- cutoff total: " + std::to_string(result.cutoff_total) + "\n";
    out += "- tie-break variable: " + (result.tiebreak_variable ? *result.tiebreak_variable : std::string("(none)")) + "\n";
    out += "- tie-break: " + result.tie_break_note + "\n";

    out += "\n## Selected\n\n";
    for (std::size_t i = 0; i < result.selected.size(); ++i) out += std::to_string(i + 1) + ". " + result.selected[i] + "\n";

    out += "\n## Borda totals\n\n";
    const auto& t = result.borda;
    std::vector<std::string> head{"position", "candidate"};
    for (const auto& v : t.criterion_ids) head.push_back(v + " rank");
    head.push_back("total");
    head.push_back("status");
    detail::md_header(out, head);
    for (std::size_t i = 0; i < result.order.size(); ++i) {
        const auto& id = result.order[i];
        const std::size_t m = *result.ranks.model_index(id);
        std::vector<std::string> row{std::to_string(i + 1), id};
        for (std::size_t c = 0; c < t.criterion_ids.size(); ++c) row.push_back(std::to_string(result.ranks.at(m, c)));
        row.push_back(std::to_string(t.totals[m]));
        row.push_back(i < result.selected.size() ? "selected" : "not selected");
        detail::md_row(out, row);
    }

    if (impact) {
        out += "\n## Adverse impact\n\n";
        out += "delta = pool proportion - selected proportion\n\n";
        detail::md_header(out, {"attribute", "category", "pool", "selected", "pool proportion", "selected proportion", "delta"});
        for (const auto& r : impact->rows)
            detail::md_row(out, {r.attribute, r.category, std::to_string(r.pool_count), std::to_string(r.selected_count),
                                 detail::fixed6(r.pool_proportion), detail::fixed6(r.selected_proportion),
                                 detail::fixed6(r.delta)});
    }
    if (combined) {
        out += "\n## Combined metric (stand-in)\n\n";
        out += "Stand-in only: selection accuracy minus mean absolute adverse-impact delta. "
               "It is not an official competition metric.\n\n";
        out += "- selection accuracy: " + detail::fixed6(combined->selection_accuracy) + "\n";
        out += "- mean absolute delta: " + detail::fixed6(combined->mean_absolute_delta) + "\n";
        out += "- combined (stand-in): " + detail::fixed6(combined->value) + "\n";
    }
    return out;
}

inline std::string render_explanation(const CandidateExplanation& ex, std::size_t pool_size) {
    std::string out = "candidate: " + ex.candidate + "\n";
    out += std::string("status: ") + (ex.selected ? "selected" : "not selected") + "\n";
    out += "position: " + std::to_string(ex.position) + " of " + std::to_string(pool_size) + "\n";
    out += "total: " + std::to_string(ex.total) + "\n";
    out += "cutoff total: " + std::to_string(ex.cutoff_total) + "\n";
    out += "margin: " + std::to_string(ex.margin) + (ex.selected ? " points above the cutoff" : " points below the cutoff") + "\n";
    if (ex.tie_decider != TieDecider::None) out += "tie-break: " + ex.tie_note + "\n";
    out += "\n";
    detail::md_header(out, {"variable", "rank", "points"});
    for (std::size_t v = 0; v < ex.variables.size(); ++v)
        detail::md_row(out, {ex.variables[v], std::to_string(ex.ranks[v]), std::to_string(ex.points[v])});
    return out;
}

/// One row per config; rows whose winner set differs from the first config are flagged.
inline std::string render_sensitivity(const std::vector<SensitivityRow>& rows) {
    std::string out;
    detail::md_header(out, {"config", "winners", "decided by", "changed"});
    for (const auto& r : rows) {
        bool changed = !rows.empty() && r.outcome.winners != rows.front().outcome.winners;
        detail::md_row(out, {r.label, detail::join(r.outcome.winners), std::string(to_string(r.outcome.decided_by)),
                             changed ? "*" : ""});
    }
    return out;
}

} // namespace mcc
