#pragma once

// Criterion definitions and quantization of raw scores into dense ordinal ranks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "mcc/error.hpp"

namespace mcc {

enum class Direction { LowerIsBetter, HigherIsBetter };

enum class Category { Theoretical, Psychological, Scientific, Explainability, Ethical, Custom };

inline std::string_view to_string(Direction d) {
    return d == Direction::LowerIsBetter ? "lower_is_better" : "higher_is_better";
}

inline std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "lower_is_better") return Direction::LowerIsBetter;
    if (s == "higher_is_better") return Direction::HigherIsBetter;
    return std::nullopt;
}

inline std::string_view to_string(Category c) {
    switch (c) {
        case Category::Theoretical: return "theoretical";
        case Category::Psychological: return "psychological";
        case Category::Scientific: return "scientific";
        case Category::Explainability: return "explainability";
        case Category::Ethical: return "ethical";
        case Category::Custom: return "custom";
    }
    return "custom";
}

inline std::optional<Category> parse_category(std::string_view s) {
    for (auto c : {Category::Theoretical, Category::Psychological, Category::Scientific,
                   Category::Explainability, Category::Ethical, Category::Custom}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

/// Rank raw scores directly.
struct Ordinal {
    bool operator==(const Ordinal&) const = default;
};

/// Values strictly on the good side of `threshold` rank 1, the rest rank 2.
struct BinaryThreshold {
    double threshold = 0.0;
    bool operator==(const BinaryThreshold&) const = default;
};

/// Categorical bins delimited by strictly increasing edges. Values past the
/// last edge on the bad side fall into an overflow bin.
struct Binned {
    std::vector<double> edges;
    bool operator==(const Binned&) const = default;
};

using QuantizationMode = std::variant<Ordinal, BinaryThreshold, Binned>;

inline std::string describe(const QuantizationMode& mode) {
    struct {
        std::string operator()(const Ordinal&) const { return "ordinal"; }
        std::string operator()(const BinaryThreshold& t) const {
            return "threshold(" + std::to_string(t.threshold) + ")";
        }
        std::string operator()(const Binned& b) const { return "binned(" + std::to_string(b.edges.size()) + " edges)"; }
    } v;
    return std::visit(v, mode);
}

/// Throws InputError if the mode's parameters are unusable.
inline void validate_mode(const QuantizationMode& mode) {
    if (const auto* t = std::get_if<BinaryThreshold>(&mode)) {
        if (!std::isfinite(t->threshold)) throw InputError("threshold must be finite");
    } else if (const auto* b = std::get_if<Binned>(&mode)) {
        if (b->edges.empty()) throw InputError("binned mode needs at least one edge");
        for (std::size_t i = 0; i < b->edges.size(); ++i) {
            if (!std::isfinite(b->edges[i])) throw InputError("bin edges must be finite");
            if (i > 0 && !(b->edges[i - 1] < b->edges[i]))
                throw InputError("bin edges must be strictly increasing");
        }
    }
}

struct Criterion {
    std::string id;
    std::string display_name;
    Category category = Category::Custom;
    Direction direction = Direction::LowerIsBetter;
    QuantizationMode mode = Ordinal{};
};

/// Raised by the column quantizers; `index` is the offending position so
/// callers holding model ids can name it.
class NonFiniteValue : public InputError {
public:
    NonFiniteValue(std::size_t index, double value)
        : InputError("non-finite value " + std::to_string(value) + " at position " + std::to_string(index)),
          index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

namespace detail {

inline void require_finite(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw NonFiniteValue(i, values[i]);
    }
}

inline bool better(double a, double b, Direction d) {
    return d == Direction::LowerIsBetter ? a < b : a > b;
}

} // namespace detail

/// True iff the ranks form {1..k} for some k >= 1 with no gaps.
inline bool is_dense_column(std::span<const int> ranks) {
    if (ranks.empty()) return false;
    std::vector<int> sorted(ranks.begin(), ranks.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] != static_cast<int>(i) + 1) return false;
    }
    return true;
}

/// Relabels arbitrary ordinal labels (smaller = better) to 1..k, preserving order.
inline std::vector<int> densify(std::span<const int> labels) {
    std::vector<int> distinct(labels.begin(), labels.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> out;
    out.reserve(labels.size());
    for (int l : labels) {
        auto it = std::lower_bound(distinct.begin(), distinct.end(), l);
        out.push_back(static_cast<int>(it - distinct.begin()) + 1);
    }
    return out;
}

/// Dense ranks, 1 = best under `direction`. Equal values (exact comparison) share a rank.
inline std::vector<int> rank_dense(std::span<const double> values, Direction direction) {
    if (values.empty()) throw InputError("cannot rank an empty column");
    detail::require_finite(values);
    std::vector<double> distinct(values.begin(), values.end());
    std::sort(distinct.begin(), distinct.end(),
              [direction](double a, double b) { return detail::better(a, b, direction); });
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> out;
    out.reserve(values.size());
    for (double v : values) {
        auto it = std::lower_bound(distinct.begin(), distinct.end(), v,
                                   [direction](double a, double b) { return detail::better(a, b, direction); });
        out.push_back(static_cast<int>(it - distinct.begin()) + 1);
    }
    return out;
}

inline std::vector<int> binarize_threshold(std::span<const double> values, Direction direction, double threshold) {
    if (values.empty()) throw InputError("cannot quantize an empty column");
    validate_mode(BinaryThreshold{threshold});
    detail::require_finite(values);
    std::vector<int> labels;
    labels.reserve(values.size());
    for (double v : values) labels.push_back(detail::better(v, threshold, direction) ? 1 : 2);
    return densify(labels);
}

inline std::vector<int> binarize_threshold(std::span<const double> values, const Criterion& criterion) {
    const auto* t = std::get_if<BinaryThreshold>(&criterion.mode);
    if (!t) throw InputError("criterion '" + criterion.id + "' is not a threshold criterion");
    return binarize_threshold(values, criterion.direction, t->threshold);
}

/// Bin index before densification. For lower_is_better, bin 1 holds values
/// strictly below the first edge and each reached edge pushes the value one
/// bin worse; higher_is_better mirrors this from the top edge down.
inline int bin_index(double value, Direction direction, std::span<const double> edges) {
    int passed = 0;
    for (double e : edges) {
        if (direction == Direction::LowerIsBetter ? value >= e : value <= e) ++passed;
    }
    return passed + 1;
}

inline std::vector<int> bin_ordinal(std::span<const double> values, Direction direction, std::span<const double> edges) {
    if (values.empty()) throw InputError("cannot quantize an empty column");
    validate_mode(Binned{std::vector<double>(edges.begin(), edges.end())});
    detail::require_finite(values);
    std::vector<int> labels;
    labels.reserve(values.size());
    for (double v : values) labels.push_back(bin_index(v, direction, edges));
    return densify(labels);
}

inline std::vector<int> bin_ordinal(std::span<const double> values, const Criterion& criterion) {
    const auto* b = std::get_if<Binned>(&criterion.mode);
    if (!b) throw InputError("criterion '" + criterion.id + "' is not a binned criterion");
    return bin_ordinal(values, criterion.direction, b->edges);
}

inline std::vector<int> quantize_column(std::span<const double> values, Direction direction,
                                        const QuantizationMode& mode) {
    struct {
        std::span<const double> values;
        Direction direction;
        std::vector<int> operator()(const Ordinal&) const { return rank_dense(values, direction); }
        std::vector<int> operator()(const BinaryThreshold& t) const {
            return binarize_threshold(values, direction, t.threshold);
        }
        std::vector<int> operator()(const Binned& b) const { return bin_ordinal(values, direction, b.edges); }
    } v{values, direction};
    return std::visit(v, mode);
}

namespace detail {

inline void require_unique(const std::vector<std::string>& ids, std::string_view what) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (id.empty()) throw InputError(std::string(what) + " id must not be empty");
        if (!seen.insert(id).second) throw InputError("duplicate " + std::string(what) + " id '" + id + "'");
    }
}

inline std::optional<std::size_t> index_of(const std::vector<std::string>& ids, std::string_view id) {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) return std::nullopt;
    return static_cast<std::size_t>(it - ids.begin());
}

} // namespace detail

/// Raw real-valued scores, models x criteria, stored row-major.
class ScoreMatrix {
public:
    ScoreMatrix(std::vector<std::string> model_ids, std::vector<Criterion> criteria, std::vector<double> values)
        : model_ids_(std::move(model_ids)), criteria_(std::move(criteria)), values_(std::move(values)) {
        if (model_ids_.empty()) throw InputError("no models");
        if (criteria_.empty()) throw InputError("no criteria");
        detail::require_unique(model_ids_, "model");
        std::vector<std::string> cids;
        for (const auto& c : criteria_) {
            cids.push_back(c.id);
            validate_mode(c.mode);
        }
        detail::require_unique(cids, "criterion");
        if (values_.size() != model_ids_.size() * criteria_.size())
            throw InputError("score matrix is not rectangular");
    }

    std::size_t model_count() const { return model_ids_.size(); }
    std::size_t criterion_count() const { return criteria_.size(); }
    const std::vector<std::string>& model_ids() const { return model_ids_; }
    const std::vector<Criterion>& criteria() const { return criteria_; }
    const std::vector<double>& values() const { return values_; }

    double at(std::size_t model, std::size_t criterion) const {
        return values_[model * criteria_.size() + criterion];
    }

    std::vector<double> column(std::size_t criterion) const {
        std::vector<double> out;
        out.reserve(model_count());
        for (std::size_t m = 0; m < model_count(); ++m) out.push_back(at(m, criterion));
        return out;
    }

    /// Same scores under different criteria (e.g. alternative quantization modes).
    ScoreMatrix with_criteria(std::vector<Criterion> criteria) const {
        return ScoreMatrix(model_ids_, std::move(criteria), values_);
    }

private:
    std::vector<std::string> model_ids_;
    std::vector<Criterion> criteria_;
    std::vector<double> values_;
};

/// Dense ordinal ranks (1 = best, ties share a rank), models x criteria, row-major.
/// Every column is validated against the dense invariant on construction.
class RankMatrix {
public:
    RankMatrix(std::vector<std::string> model_ids, std::vector<std::string> criterion_ids, std::vector<int> ranks)
        : model_ids_(std::move(model_ids)), criterion_ids_(std::move(criterion_ids)), ranks_(std::move(ranks)) {
        if (model_ids_.empty()) throw InputError("no models");
        if (criterion_ids_.empty()) throw InputError("no criteria");
        detail::require_unique(model_ids_, "model");
        detail::require_unique(criterion_ids_, "criterion");
        if (ranks_.size() != model_ids_.size() * criterion_ids_.size())
            throw InputError("rank matrix is not rectangular");
        for (std::size_t c = 0; c < criterion_ids_.size(); ++c) {
            auto col = column(c);
            if (!is_dense_column(col)) throw InputError("non-dense column '" + criterion_ids_[c] + "'");
        }
    }

    std::size_t model_count() const { return model_ids_.size(); }
    std::size_t criterion_count() const { return criterion_ids_.size(); }
    const std::vector<std::string>& model_ids() const { return model_ids_; }
    const std::vector<std::string>& criterion_ids() const { return criterion_ids_; }
    const std::vector<int>& ranks() const { return ranks_; }

    int at(std::size_t model, std::size_t criterion) const { return ranks_[model * criterion_ids_.size() + criterion]; }

    std::span<const int> row(std::size_t model) const {
        return std::span<const int>(ranks_).subspan(model * criterion_ids_.size(), criterion_ids_.size());
    }

    std::vector<int> column(std::size_t criterion) const {
        std::vector<int> out;
        out.reserve(model_count());
        for (std::size_t m = 0; m < model_count(); ++m) out.push_back(at(m, criterion));
        return out;
    }

    std::optional<std::size_t> model_index(std::string_view id) const { return detail::index_of(model_ids_, id); }
    std::optional<std::size_t> criterion_index(std::string_view id) const {
        return detail::index_of(criterion_ids_, id);
    }

    bool operator==(const RankMatrix&) const = default;

private:
    std::vector<std::string> model_ids_;
    std::vector<std::string> criterion_ids_;
    std::vector<int> ranks_;
};

/// Applies each criterion's quantization mode column by column.
inline RankMatrix quantize_matrix(const ScoreMatrix& scores) {
    const std::size_t m = scores.model_count();
    const std::size_t k = scores.criterion_count();
    std::vector<int> ranks(m * k);
    std::vector<std::string> cids;
    cids.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
        const Criterion& crit = scores.criteria()[c];
        cids.push_back(crit.id);
        std::vector<int> col;
        try {
            col = quantize_column(scores.column(c), crit.direction, crit.mode);
        } catch (const NonFiniteValue& e) {
            throw InputError("criterion '" + crit.id + "': non-finite value for model '" +
                             scores.model_ids()[e.index()] + "'");
        } catch (const InputError& e) {
            throw InputError("criterion '" + crit.id + "': " + e.what());
        }
        for (std::size_t r = 0; r < m; ++r) ranks[r * k + c] = col[r];
    }
    return RankMatrix(scores.model_ids(), std::move(cids), std::move(ranks));
}

} // namespace mcc
