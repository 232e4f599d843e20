#pragma once

// Two-stage evaluation over a RankMatrix: Condorcet pairwise tournament,
// Borda run-off, then an agreed tie-break policy.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mcc/criteria.hpp"
#include "mcc/error.hpp"

namespace mcc {

struct PairwiseResult {
    std::string model_a;
    std::string model_b;
    int wins_a = 0;
    int wins_b = 0;
    int ties = 0;

    bool a_dominates() const { return wins_a > wins_b; }
    bool b_dominates() const { return wins_b > wins_a; }
    bool tied() const { return wins_a == wins_b; }
};

namespace detail {

inline PairwiseResult compare_rows(const RankMatrix& ranks, std::size_t a, std::size_t b) {
    PairwiseResult r{ranks.model_ids()[a], ranks.model_ids()[b]};
    auto ra = ranks.row(a);
    auto rb = ranks.row(b);
    for (std::size_t c = 0; c < ra.size(); ++c) {
        if (ra[c] < rb[c]) ++r.wins_a;
        else if (rb[c] < ra[c]) ++r.wins_b;
        else ++r.ties;
    }
    return r;
}

inline std::size_t require_model(const RankMatrix& ranks, std::string_view id) {
    auto idx = ranks.model_index(id);
    if (!idx) throw InputError("unknown model '" + std::string(id) + "'");
    return *idx;
}

} // namespace detail

/// Counts criteria on which each model ranks strictly better. The model with
/// more such wins dominates; criteria with equal rank count for neither.
inline PairwiseResult pairwise_compare(const RankMatrix& ranks, std::string_view a, std::string_view b) {
    if (a == b) throw InputError("cannot compare model '" + std::string(a) + "' with itself");
    return detail::compare_rows(ranks, detail::require_model(ranks, a), detail::require_model(ranks, b));
}

struct DominanceEdge {
    std::string winner;
    std::string loser;
    bool operator==(const DominanceEdge&) const = default;
};

struct TieEdge {
    std::string first;
    std::string second;
    bool operator==(const TieEdge&) const = default;
};

/// Pairwise win/tie relation: exactly one of {a->b, b->a, tie{a,b}} per
/// unordered pair. `pairs` keeps the counts behind each relation, in the
/// same (i < j) node order.
struct DominanceGraph {
    std::vector<std::string> nodes;
    std::vector<DominanceEdge> edges;
    std::vector<TieEdge> tie_edges;
    std::vector<PairwiseResult> pairs;

    std::size_t out_degree(std::string_view node) const {
        return static_cast<std::size_t>(
            std::count_if(edges.begin(), edges.end(), [&](const DominanceEdge& e) { return e.winner == node; }));
    }

    bool dominates(std::string_view a, std::string_view b) const {
        return std::any_of(edges.begin(), edges.end(),
                           [&](const DominanceEdge& e) { return e.winner == a && e.loser == b; });
    }

    bool tied(std::string_view a, std::string_view b) const {
        return std::any_of(tie_edges.begin(), tie_edges.end(), [&](const TieEdge& t) {
            return (t.first == a && t.second == b) || (t.first == b && t.second == a);
        });
    }
};

inline DominanceGraph build_dominance_graph(const RankMatrix& ranks) {
    DominanceGraph g;
    g.nodes = ranks.model_ids();
    const std::size_t n = ranks.model_count();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            auto r = detail::compare_rows(ranks, i, j);
            if (r.a_dominates()) g.edges.push_back({r.model_a, r.model_b});
            else if (r.b_dominates()) g.edges.push_back({r.model_b, r.model_a});
            else g.tie_edges.push_back({r.model_a, r.model_b});
            g.pairs.push_back(std::move(r));
        }
    }
    return g;
}

/// The node with an outgoing edge to every other node, if any. A node in a
/// pairwise tie can never qualify.
inline std::optional<std::string> condorcet_winner(const DominanceGraph& graph) {
    if (graph.nodes.empty()) return std::nullopt;
    const std::size_t others = graph.nodes.size() - 1;
    for (const auto& node : graph.nodes) {
        if (graph.out_degree(node) == others) return node;
    }
    return std::nullopt;
}

/// Borda points per (model, criterion) = N - dense rank, N = model count.
struct BordaTable {
    std::vector<std::string> model_ids;
    std::vector<std::string> criterion_ids;
    std::vector<int> points;  // row-major, models x criteria
    std::vector<int> totals;

    int points_at(std::size_t model, std::size_t criterion) const {
        return points[model * criterion_ids.size() + criterion];
    }

    int max_total() const { return totals.empty() ? 0 : *std::max_element(totals.begin(), totals.end()); }
};

inline BordaTable borda_scores(const RankMatrix& ranks) {
    BordaTable t{ranks.model_ids(), ranks.criterion_ids(), {}, {}};
    const int n = static_cast<int>(ranks.model_count());
    t.points.reserve(ranks.ranks().size());
    for (std::size_t m = 0; m < ranks.model_count(); ++m) {
        int total = 0;
        for (int r : ranks.row(m)) {
            t.points.push_back(n - r);
            total += n - r;
        }
        t.totals.push_back(total);
    }
    return t;
}

struct AllowCoWinners {
    bool operator==(const AllowCoWinners&) const = default;
};

/// Compare tied models on each listed criterion in turn, keeping the best-ranked.
struct PriorityCriteria {
    std::vector<std::string> criteria;
    bool operator==(const PriorityCriteria&) const = default;
};

using TieBreakPolicy = std::variant<AllowCoWinners, PriorityCriteria>;

/// Grammar: `co-winners` | `priority:<id>[,<id>...]`.
inline TieBreakPolicy parse_tiebreak_policy(std::string_view expr) {
    if (expr == "co-winners") return AllowCoWinners{};
    constexpr std::string_view prefix = "priority:";
    if (expr.substr(0, prefix.size()) != prefix)
        throw ConfigError("invalid tie-break policy '" + std::string(expr) +
                          "' (expected 'co-winners' or 'priority:<id>[,<id>...]')");
    PriorityCriteria p;
    std::string rest(expr.substr(prefix.size()));
    std::stringstream ss(rest);
    std::string id;
    while (std::getline(ss, id, ',')) {
        if (id.empty()) throw ConfigError("empty criterion id in tie-break policy '" + std::string(expr) + "'");
        p.criteria.push_back(id);
    }
    if (!rest.empty() && rest.back() == ',')
        throw ConfigError("empty criterion id in tie-break policy '" + std::string(expr) + "'");
    if (p.criteria.empty()) throw ConfigError("priority tie-break needs at least one criterion");
    return p;
}

inline std::string to_string(const TieBreakPolicy& policy) {
    if (std::holds_alternative<AllowCoWinners>(policy)) return "co-winners";
    std::string out = "priority:";
    const auto& ids = std::get<PriorityCriteria>(policy).criteria;
    for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + ids[i];
    return out;
}

inline void validate_policy(const TieBreakPolicy& policy, const std::vector<std::string>& criterion_ids) {
    const auto* p = std::get_if<PriorityCriteria>(&policy);
    if (!p) return;
    if (p->criteria.empty()) throw ConfigError("priority tie-break needs at least one criterion");
    for (const auto& id : p->criteria) {
        if (std::find(criterion_ids.begin(), criterion_ids.end(), id) == criterion_ids.end())
            throw ConfigError("tie-break policy names unknown criterion '" + id + "'");
    }
}

struct TieBreakTrace {
    std::vector<std::string> remaining;
    std::vector<std::string> steps;
};

namespace detail {

inline std::string join(const std::vector<std::string>& ids, std::string_view sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += sep;
        out += ids[i];
    }
    return out;
}

} // namespace detail

inline TieBreakTrace apply_tiebreak_traced(const std::vector<std::string>& tied, const TieBreakPolicy& policy,
                                           const RankMatrix& ranks) {
    if (tied.empty()) throw InputError("tie-break needs at least one model");
    validate_policy(policy, ranks.criterion_ids());
    std::vector<std::size_t> idx;
    for (const auto& id : tied) idx.push_back(detail::require_model(ranks, id));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());

    TieBreakTrace trace;
    if (const auto* p = std::get_if<PriorityCriteria>(&policy)) {
        for (const auto& cid : p->criteria) {
            if (idx.size() <= 1) break;
            const std::size_t c = *ranks.criterion_index(cid);
            int best = ranks.at(idx.front(), c);
            for (auto m : idx) best = std::min(best, ranks.at(m, c));
            std::vector<std::size_t> kept;
            std::vector<std::string> dropped;
            for (auto m : idx) {
                if (ranks.at(m, c) == best) kept.push_back(m);
                else dropped.push_back(ranks.model_ids()[m] + " (rank " + std::to_string(ranks.at(m, c)) + ")");
            }
            std::string step = "criterion " + cid + ": best rank " + std::to_string(best);
            step += dropped.empty() ? ", no model eliminated" : "; eliminated " + detail::join(dropped);
            trace.steps.push_back(std::move(step));
            idx = std::move(kept);
        }
        if (idx.size() > 1) trace.steps.push_back("priority list exhausted; remaining models are co-winners");
    } else {
        trace.steps.push_back("co-winners accepted by policy");
    }
    for (auto m : idx) trace.remaining.push_back(ranks.model_ids()[m]);
    return trace;
}

/// Narrows a tied set under `policy`. Result is non-empty and in model order.
inline std::vector<std::string> apply_tiebreak(const std::vector<std::string>& tied, const TieBreakPolicy& policy,
                                               const RankMatrix& ranks) {
    return apply_tiebreak_traced(tied, policy, ranks).remaining;
}

enum class DecisionStage { Condorcet, Borda, Tiebreak, CoWinners };

inline std::string_view to_string(DecisionStage s) {
    switch (s) {
        case DecisionStage::Condorcet: return "condorcet";
        case DecisionStage::Borda: return "borda";
        case DecisionStage::Tiebreak: return "tiebreak";
        case DecisionStage::CoWinners: return "co_winners";
    }
    return "";
}

struct AuditRecord {
    std::string stage;
    std::string detail;
};

struct EvaluationOutcome {
    std::vector<std::string> winners;
    DecisionStage decided_by = DecisionStage::Condorcet;
    TieBreakPolicy policy;
    RankMatrix ranks;
    DominanceGraph dominance_graph;
    std::optional<BordaTable> borda_table;
    std::vector<AuditRecord> audit;
};

inline EvaluationOutcome evaluate(const RankMatrix& ranks, const TieBreakPolicy& policy) {
    validate_policy(policy, ranks.criterion_ids());
    EvaluationOutcome out{{}, DecisionStage::Condorcet, policy, ranks, build_dominance_graph(ranks), std::nullopt, {}};
    const auto& g = out.dominance_graph;
    out.audit.push_back({"pairwise", std::to_string(g.pairs.size()) + " pairwise comparisons over " +
                                         std::to_string(ranks.criterion_count()) + " criteria: " +
                                         std::to_string(g.edges.size()) + " dominance edges, " +
                                         std::to_string(g.tie_edges.size()) + " ties"});

    if (auto winner = condorcet_winner(g)) {
        out.winners = {*winner};
        out.decided_by = DecisionStage::Condorcet;
        out.audit.push_back({"condorcet", *winner + " dominates all " + std::to_string(g.nodes.size() - 1) +
                                              " other models; evaluation ends"});
        return out;
    }

    std::size_t best_degree = 0;
    for (const auto& n : g.nodes) best_degree = std::max(best_degree, g.out_degree(n));
    std::vector<std::string> leaders;
    for (const auto& n : g.nodes)
        if (g.out_degree(n) == best_degree) leaders.push_back(n);
    out.audit.push_back({"condorcet", "no Condorcet winner; most dominance edges: " + detail::join(leaders) + " (" +
                                          std::to_string(best_degree) + " of " +
                                          std::to_string(g.nodes.size() - 1) + ")"});

    BordaTable table = borda_scores(ranks);
    const int top = table.max_total();
    std::vector<std::string> top_models;
    for (std::size_t m = 0; m < table.totals.size(); ++m)
        if (table.totals[m] == top) top_models.push_back(table.model_ids[m]);
    out.borda_table = std::move(table);

    if (top_models.size() == 1) {
        out.winners = top_models;
        out.decided_by = DecisionStage::Borda;
        out.audit.push_back({"borda", top_models.front() + " has the highest Borda total (" + std::to_string(top) + ")"});
        return out;
    }
    out.audit.push_back(
        {"borda", "highest Borda total " + std::to_string(top) + " shared by " + detail::join(top_models)});

    auto trace = apply_tiebreak_traced(top_models, policy, ranks);
    for (auto& s : trace.steps) out.audit.push_back({"tiebreak", std::move(s)});
    out.decided_by = trace.remaining.size() < top_models.size() ? DecisionStage::Tiebreak : DecisionStage::CoWinners;
    out.winners = std::move(trace.remaining);
    return out;
}

/// One alternative assignment of quantization modes, in criterion order.
struct SensitivityConfig {
    std::string label;
    std::vector<QuantizationMode> modes;
};

struct SensitivityRow {
    std::string label;
    EvaluationOutcome outcome;
};

/// Re-runs quantization and evaluation once per configuration.
inline std::vector<SensitivityRow> sensitivity(const ScoreMatrix& scores, const std::vector<SensitivityConfig>& configs,
                                               const TieBreakPolicy& policy) {
    std::vector<SensitivityRow> rows;
    rows.reserve(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto& cfg = configs[i];
        const std::string where = "config #" + std::to_string(i) + " (" + cfg.label + "): ";
        if (cfg.modes.size() != scores.criterion_count())
            throw ConfigError(where + "expected " + std::to_string(scores.criterion_count()) + " modes, got " +
                              std::to_string(cfg.modes.size()));
        auto criteria = scores.criteria();
        for (std::size_t c = 0; c < criteria.size(); ++c) criteria[c].mode = cfg.modes[c];
        try {
            rows.push_back({cfg.label, evaluate(quantize_matrix(scores.with_criteria(std::move(criteria))), policy)});
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        } catch (const InputError& e) {
            throw InputError(where + e.what());
        }
    }
    return rows;
}

} // namespace mcc
