#pragma once

// Borda-based candidate selection: rank candidates on each variable, sum Borda
// points, keep the top fraction. Also adverse-impact deltas and per-candidate
// explanations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mcc/criteria.hpp"
#include "mcc/error.hpp"
#include "mcc/tournament.hpp"

namespace mcc {

struct Variable {
    std::string name;
    Direction direction = Direction::HigherIsBetter;
};

/// Candidates x variables, plus optional protected attributes (candidates x
/// attributes category labels). When attributes are declared every candidate
/// carries a label for each.
class CandidatePool {
public:
    CandidatePool(std::vector<std::string> candidate_ids, std::vector<Variable> variables, std::vector<double> values,
                  std::vector<std::string> attributes = {}, std::vector<std::string> labels = {})
        : ids_(std::move(candidate_ids)),
          variables_(std::move(variables)),
          values_(std::move(values)),
          attributes_(std::move(attributes)),
          labels_(std::move(labels)) {
        if (ids_.size() < 2) throw InputError("a candidate pool needs at least 2 candidates");
        if (variables_.empty()) throw InputError("a candidate pool needs at least 1 variable");
        detail::require_unique(ids_, "candidate");
        std::vector<std::string> names;
        for (const auto& v : variables_) names.push_back(v.name);
        detail::require_unique(names, "variable");
        if (values_.size() != ids_.size() * variables_.size()) throw InputError("candidate values are not rectangular");
        detail::require_unique(attributes_, "protected attribute");
        if (labels_.size() != ids_.size() * attributes_.size())
            throw InputError("protected attributes must be defined for every candidate");
    }

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& candidate_ids() const { return ids_; }
    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<std::string>& attributes() const { return attributes_; }
    bool has_protected_attributes() const { return !attributes_.empty(); }

    double value(std::size_t candidate, std::size_t variable) const {
        return values_[candidate * variables_.size() + variable];
    }
    const std::string& label(std::size_t candidate, std::size_t attribute) const {
        return labels_[candidate * attributes_.size() + attribute];
    }

    std::optional<std::size_t> candidate_index(std::string_view id) const { return detail::index_of(ids_, id); }
    std::optional<std::size_t> variable_index(std::string_view name) const {
        for (std::size_t i = 0; i < variables_.size(); ++i)
            if (variables_[i].name == name) return i;
        return std::nullopt;
    }

private:
    std::vector<std::string> ids_;
    std::vector<Variable> variables_;
    std::vector<double> values_;
    std::vector<std::string> attributes_;
    std::vector<std::string> labels_;
};

/// Dense per-variable ranks; variable names become criterion ids.
inline RankMatrix rank_candidates(const CandidatePool& pool) {
    const std::size_t n = pool.size();
    const std::size_t k = pool.variables().size();
    std::vector<int> ranks(n * k);
    std::vector<std::string> names;
    for (std::size_t v = 0; v < k; ++v) {
        const auto& var = pool.variables()[v];
        names.push_back(var.name);
        std::vector<double> col;
        for (std::size_t c = 0; c < n; ++c) col.push_back(pool.value(c, v));
        std::vector<int> r;
        try {
            r = rank_dense(col, var.direction);
        } catch (const NonFiniteValue& e) {
            throw InputError("non-finite value for candidate '" + pool.candidate_ids()[e.index()] + "', variable '" +
                             var.name + "'");
        }
        for (std::size_t c = 0; c < n; ++c) ranks[c * k + v] = r[c];
    }
    return RankMatrix(pool.candidate_ids(), std::move(names), std::move(ranks));
}

/// Number of candidates kept for `fraction` of a pool of `n`.
inline std::size_t selection_count(double fraction, std::size_t n) {
    // Small slack so decimal fractions like 0.29 * 100 land on 29, not 28.
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

struct SelectionResult {
    std::vector<std::string> selected;  // best first
    std::vector<std::string> order;     // full ranking, best first
    double fraction_requested = 0.0;
    RankMatrix ranks;
    BordaTable borda;
    int cutoff_total = 0;
    std::optional<std::string> tiebreak_variable;
    bool cutoff_tie = false;
    std::string tie_break_note;

    int total_of(std::string_view id) const {
        auto idx = ranks.model_index(id);
        if (!idx) throw InputError("unknown candidate '" + std::string(id) + "'");
        return borda.totals[*idx];
    }
    bool is_selected(std::string_view id) const {
        return std::find(selected.begin(), selected.end(), id) != selected.end();
    }
};

/// Selects floor(fraction * N) candidates with the highest Borda totals.
/// Ties at the cutoff go to the better rank on `tiebreak_variable` (when
/// given), then to the lexicographically smaller candidate id.
inline SelectionResult borda_select(const CandidatePool& pool, double fraction,
                                    const std::optional<std::string>& tiebreak_variable = std::nullopt) {
    if (!std::isfinite(fraction) || fraction <= 0.0 || fraction > 1.0)
        throw ConfigError("fraction must be in (0, 1], got " + std::to_string(fraction));
    std::optional<std::size_t> tb;
    if (tiebreak_variable) {
        tb = pool.variable_index(*tiebreak_variable);
        if (!tb) throw ConfigError("unknown tie-break variable '" + *tiebreak_variable + "'");
    }
    const std::size_t count = selection_count(fraction, pool.size());
    if (count == 0)
        throw ConfigError("fraction " + std::to_string(fraction) + " selects no candidates from a pool of " +
                          std::to_string(pool.size()));

    RankMatrix ranks = rank_candidates(pool);
    BordaTable borda = borda_scores(ranks);

    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (borda.totals[a] != borda.totals[b]) return borda.totals[a] > borda.totals[b];
        if (tb && ranks.at(a, *tb) != ranks.at(b, *tb)) return ranks.at(a, *tb) < ranks.at(b, *tb);
        return pool.candidate_ids()[a] < pool.candidate_ids()[b];
    });

    SelectionResult res{{}, {}, fraction, ranks, borda, 0, tiebreak_variable, false, {}};
    for (std::size_t i = 0; i < order.size(); ++i) {
        res.order.push_back(pool.candidate_ids()[order[i]]);
        if (i < count) res.selected.push_back(pool.candidate_ids()[order[i]]);
    }
    res.cutoff_total = borda.totals[order[count - 1]];
    res.cutoff_tie = count < order.size() && borda.totals[order[count]] == res.cutoff_total;

    if (res.cutoff_tie) {
        std::size_t tied = 0, tied_in = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (borda.totals[order[i]] != res.cutoff_total) continue;
            ++tied;
            if (i < count) ++tied_in;
        }
        res.tie_break_note = std::to_string(tied) + " candidates tied at the cutoff total " +
                             std::to_string(res.cutoff_total) + " for " + std::to_string(tied_in) +
                             " remaining places; broken by " +
                             (tiebreak_variable ? "rank on '" + *tiebreak_variable + "', then " : std::string()) +
                             "ascending candidate id";
    } else {
        res.tie_break_note = "no tie at the cutoff; tie-breaking not exercised";
    }
    return res;
}

struct AdverseImpactRow {
    std::string attribute;
    std::string category;
    std::size_t pool_count = 0;
    std::size_t selected_count = 0;
    double pool_proportion = 0.0;
    double selected_proportion = 0.0;
    double delta = 0.0;  // pool_proportion - selected_proportion
};

/// Rows grouped by attribute (declared order), categories ascending.
struct AdverseImpactReport {
    std::vector<AdverseImpactRow> rows;

    double mean_absolute_delta() const {
        if (rows.empty()) return 0.0;
        double sum = 0.0;
        for (const auto& r : rows) sum += std::abs(r.delta);
        return sum / static_cast<double>(rows.size());
    }
};

inline AdverseImpactReport adverse_impact(const CandidatePool& pool, const std::vector<std::string>& selected) {
    if (!pool.has_protected_attributes()) throw InputError("candidate pool has no protected attributes");
    if (selected.empty()) throw InputError("adverse impact needs a non-empty selection");
    std::vector<bool> chosen(pool.size(), false);
    for (const auto& id : selected) {
        auto idx = pool.candidate_index(id);
        if (!idx) throw InputError("selected candidate '" + id + "' is not in the pool");
        if (chosen[*idx]) throw InputError("candidate '" + id + "' selected twice");
        chosen[*idx] = true;
    }
    const double n_pool = static_cast<double>(pool.size());
    const double n_sel = static_cast<double>(selected.size());

    AdverseImpactReport report;
    for (std::size_t a = 0; a < pool.attributes().size(); ++a) {
        std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
        for (std::size_t c = 0; c < pool.size(); ++c) {
            auto& entry = counts[pool.label(c, a)];
            ++entry.first;
            if (chosen[c]) ++entry.second;
        }
        for (const auto& [category, cnt] : counts) {
            AdverseImpactRow row{pool.attributes()[a], category, cnt.first, cnt.second,
                                 static_cast<double>(cnt.first) / n_pool, static_cast<double>(cnt.second) / n_sel, 0.0};
            row.delta = row.pool_proportion - row.selected_proportion;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

/// Stand-in for a combined "prediction minus adverse impact" score: selection
/// accuracy against externally supplied success labels, minus the mean
/// absolute adverse-impact delta. Not any competition's official metric.
struct CombinedMetricStandIn {
    double selection_accuracy = 0.0;
    double mean_absolute_delta = 0.0;
    double value = 0.0;
};

inline CombinedMetricStandIn combined_metric_standin(const CandidatePool& pool, const SelectionResult& result,
                                                     const AdverseImpactReport& impact,
                                                     const std::map<std::string, bool>& success) {
    std::size_t correct = 0;
    for (const auto& id : pool.candidate_ids()) {
        auto it = success.find(id);
        if (it == success.end()) throw InputError("no success label for candidate '" + id + "'");
        if (it->second == result.is_selected(id)) ++correct;
    }
    CombinedMetricStandIn m;
    m.selection_accuracy = static_cast<double>(correct) / static_cast<double>(pool.size());
    m.mean_absolute_delta = impact.mean_absolute_delta();
    m.value = m.selection_accuracy - m.mean_absolute_delta;
    return m;
}

enum class TieDecider { None, Variable, CandidateId };

struct CandidateExplanation {
    std::string candidate;
    std::vector<std::string> variables;
    std::vector<int> ranks;
    std::vector<int> points;
    int total = 0;
    int cutoff_total = 0;
    bool selected = false;
    int margin = 0;  // |total - cutoff_total|: points ahead of (selected) or short of (not selected) the cutoff
    std::size_t position = 0;  // 1-based place in the selection order
    TieDecider tie_decider = TieDecider::None;
    std::string tie_note;
};

inline CandidateExplanation explain_candidate(const CandidatePool& pool, const SelectionResult& result,
                                              std::string_view candidate) {
    auto idx = result.ranks.model_index(candidate);
    if (!idx || !pool.candidate_index(candidate)) throw InputError("unknown candidate '" + std::string(candidate) + "'");
    const std::size_t c = *idx;

    CandidateExplanation ex;
    ex.candidate = std::string(candidate);
    ex.variables = result.ranks.criterion_ids();
    for (std::size_t v = 0; v < ex.variables.size(); ++v) {
        ex.ranks.push_back(result.ranks.at(c, v));
        ex.points.push_back(result.borda.points_at(c, v));
    }
    ex.total = result.borda.totals[c];
    ex.cutoff_total = result.cutoff_total;
    ex.selected = result.is_selected(candidate);
    ex.margin = std::abs(ex.total - ex.cutoff_total);
    ex.position = static_cast<std::size_t>(std::find(result.order.begin(), result.order.end(), candidate) -
                                           result.order.begin()) + 1;

    if (result.cutoff_tie && ex.total == result.cutoff_total) {
        const std::size_t count = result.selected.size();
        // The rival across the cutoff line: first excluded for a selected
        // candidate, last included for an excluded one.
        const std::string& rival = ex.selected ? result.order[count] : result.order[count - 1];
        const std::size_t r = *result.ranks.model_index(rival);
        std::optional<std::size_t> tb;
        if (result.tiebreak_variable) tb = result.ranks.criterion_index(*result.tiebreak_variable);
        if (tb && result.ranks.at(c, *tb) != result.ranks.at(r, *tb)) {
            ex.tie_decider = TieDecider::Variable;
            ex.tie_note = std::string("tied at the cutoff with ") + rival + "; decided by tie-break variable '" +
                          *result.tiebreak_variable + "' (rank " + std::to_string(result.ranks.at(c, *tb)) + " vs " +
                          std::to_string(result.ranks.at(r, *tb)) + ")";
        } else {
            ex.tie_decider = TieDecider::CandidateId;
            ex.tie_note = std::string("tied at the cutoff with ") + rival + "; decided by ascending candidate id";
        }
    }
    return ex;
}

} // namespace mcc
