#pragma once

// File parsing: scores/ranks/pool CSV, criteria/pool-spec/sensitivity JSON.
// Parse warnings are returned with the result, never printed.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "mcc/criteria.hpp"
#include "mcc/error.hpp"
#include "mcc/selection.hpp"
#include "mcc/tournament.hpp"

namespace mcc {

struct CsvRecord {
    std::size_t line = 0;  // 1-based line where the record starts
    std::vector<std::string> cells;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::string coord(std::size_t line, std::size_t col, std::string_view header) {
    return "row " + std::to_string(line) + ", column " + std::to_string(col) + " ('" + std::string(header) + "')";
}

} // namespace detail

/// Minimal RFC 4180 reader: quoted fields with "" escapes, LF or CRLF line
/// ends, unquoted cells trimmed. Blank lines are skipped.
inline std::vector<CsvRecord> parse_csv(std::string_view text) {
    std::vector<CsvRecord> out;
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    CsvRecord rec;
    std::string cell;
    bool quoted = false, in_quotes = false, any = false;
    std::size_t line = 1;
    rec.line = 1;

    auto end_cell = [&] {
        rec.cells.push_back(quoted ? cell : std::string(detail::trim(cell)));
        cell.clear();
        quoted = false;
    };
    auto end_record = [&] {
        end_cell();
        bool blank = rec.cells.size() == 1 && rec.cells[0].empty() && !any;
        if (!blank) out.push_back(std::move(rec));
        rec = CsvRecord{};
        any = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                cell += ch;
            }
            continue;
        }
        if (ch == '"' && detail::trim(cell).empty()) {
            cell.clear();
            in_quotes = quoted = any = true;
        } else if (ch == ',') {
            end_cell();
            any = true;
        } else if (ch == '\n') {
            end_record();
            rec.line = ++line;
        } else if (ch != '\r' || (i + 1 < text.size() && text[i + 1] != '\n')) {
            if (!quoted) cell += ch;
        }
    }
    if (in_quotes) throw InputError("unterminated quoted field starting near line " + std::to_string(rec.line));
    if (!cell.empty() || !rec.cells.empty() || quoted) end_record();
    return out;
}

inline std::optional<double> parse_real(std::string_view s) {
    s = detail::trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<int> parse_int(std::string_view s) {
    s = detail::trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

namespace detail {

struct Table {
    std::vector<std::string> header;
    std::vector<CsvRecord> rows;
    std::size_t header_line = 1;
};

inline Table read_table(std::string_view text, std::string_view what, std::string_view no_rows) {
    auto records = parse_csv(text);
    if (records.empty()) throw InputError("empty " + std::string(what) + " file: no header row");
    Table t;
    t.header = std::move(records.front().cells);
    t.header_line = records.front().line;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i].empty()) throw InputError("header column " + std::to_string(i + 1) + " has no name");
        if (!seen.insert(t.header[i]).second) throw InputError("duplicate header column '" + t.header[i] + "'");
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].cells.size() != t.header.size())
            throw InputError("row " + std::to_string(records[r].line) + ": expected " +
                             std::to_string(t.header.size()) + " cells, got " +
                             std::to_string(records[r].cells.size()));
        t.rows.push_back(std::move(records[r]));
    }
    if (t.rows.empty()) throw InputError(std::string(no_rows));
    return t;
}

inline std::size_t require_column(const Table& t, std::string_view name, std::string_view role) {
    for (std::size_t i = 1; i < t.header.size(); ++i)
        if (t.header[i] == name) return i;
    throw InputError("missing column for " + std::string(role) + " '" + std::string(name) + "'");
}

inline std::vector<std::string> read_ids(const Table& t, std::string_view what) {
    std::vector<std::string> ids;
    std::unordered_set<std::string> seen;
    for (const auto& row : t.rows) {
        const auto& id = row.cells.front();
        if (id.empty()) throw InputError(coord(row.line, 1, t.header.front()) + ": empty " + std::string(what) + " id");
        if (!seen.insert(id).second)
            throw InputError("row " + std::to_string(row.line) + ": duplicate " + std::string(what) + " id '" + id + "'");
        ids.push_back(id);
    }
    return ids;
}

inline double read_real(const Table& t, const CsvRecord& row, std::size_t col) {
    auto v = parse_real(row.cells[col]);
    if (!v) throw InputError(coord(row.line, col + 1, t.header[col]) + ": cannot parse '" + row.cells[col] + "' as a number");
    if (!std::isfinite(*v)) throw InputError(coord(row.line, col + 1, t.header[col]) + ": non-finite value");
    return *v;
}

inline void warn_unused(const Table& t, const std::vector<bool>& used, std::vector<std::string>& warnings) {
    for (std::size_t i = 1; i < t.header.size(); ++i)
        if (!used[i]) warnings.push_back("ignoring unused column '" + t.header[i] + "' (column " + std::to_string(i + 1) + ")");
}

inline QuantizationMode mode_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw InputError("mode must be an object with a string 'kind'");
    const auto kind = j["kind"].get<std::string>();
    QuantizationMode mode;
    if (kind == "ordinal") {
        mode = Ordinal{};
    } else if (kind == "threshold") {
        if (!j.contains("value") || !j["value"].is_number()) throw InputError("threshold mode needs a numeric 'value'");
        mode = BinaryThreshold{j["value"].get<double>()};
    } else if (kind == "binned") {
        if (!j.contains("edges") || !j["edges"].is_array()) throw InputError("binned mode needs an 'edges' array");
        Binned b;
        for (const auto& e : j["edges"]) {
            if (!e.is_number()) throw InputError("bin edges must be numbers");
            b.edges.push_back(e.get<double>());
        }
        mode = std::move(b);
    } else {
        throw InputError("unknown mode kind '" + kind + "'");
    }
    validate_mode(mode);
    return mode;
}

inline std::string string_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw InputError(std::string("missing string field '") + key + "'");
    return j[key].get<std::string>();
}

inline nlohmann::json parse_json(std::string_view text, std::string_view what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("malformed " + std::string(what) + " JSON: " + e.what());
    }
}

} // namespace detail

/// Criteria document: array of {id, display_name, category, direction, mode}.
/// `display_name` defaults to the id and `category` to custom.
inline std::vector<Criterion> parse_criteria_json(std::string_view text) {
    auto doc = detail::parse_json(text, "criteria");
    if (!doc.is_array()) throw InputError("criteria JSON must be a top-level array");
    if (doc.empty()) throw InputError("criteria JSON declares no criteria");
    std::vector<Criterion> out;
    std::unordered_set<std::string> ids;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        try {
            if (!item.is_object()) throw InputError("entry is not an object");
            Criterion c;
            c.id = detail::string_field(item, "id");
            if (c.id.empty()) throw InputError("empty id");
            c.display_name = item.contains("display_name") ? detail::string_field(item, "display_name") : c.id;
            if (item.contains("category")) {
                auto cat = parse_category(detail::string_field(item, "category"));
                if (!cat) throw InputError("unknown category '" + item["category"].get<std::string>() + "'");
                c.category = *cat;
            }
            auto dir = parse_direction(detail::string_field(item, "direction"));
            if (!dir) throw InputError("direction must be 'lower_is_better' or 'higher_is_better'");
            c.direction = *dir;
            if (!item.contains("mode")) throw InputError("missing 'mode'");
            c.mode = detail::mode_from_json(item["mode"]);
            if (!ids.insert(c.id).second) throw InputError("duplicate criterion id '" + c.id + "'");
            out.push_back(std::move(c));
        } catch (const InputError& e) {
            throw InputError("criteria entry " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

struct ScoresParse {
    ScoreMatrix scores;
    std::vector<std::string> warnings;
};

/// Criteria order comes from `criteria`, not from the CSV header.
inline ScoresParse parse_scores(std::string_view text, const std::vector<Criterion>& criteria) {
    auto t = detail::read_table(text, "scores", "no models");
    std::vector<bool> used(t.header.size(), false);
    std::vector<std::size_t> cols;
    for (const auto& c : criteria) {
        cols.push_back(detail::require_column(t, c.id, "criterion"));
        used[cols.back()] = true;
    }
    auto ids = detail::read_ids(t, "model");
    std::vector<double> values;
    values.reserve(ids.size() * cols.size());
    for (const auto& row : t.rows)
        for (auto col : cols) values.push_back(detail::read_real(t, row, col));
    ScoresParse out{ScoreMatrix(std::move(ids), criteria, std::move(values)), {}};
    detail::warn_unused(t, used, out.warnings);
    return out;
}

/// Pre-quantized ranks; every column must already be dense.
inline RankMatrix parse_ranks(std::string_view text) {
    auto t = detail::read_table(text, "ranks", "no models");
    if (t.header.size() < 2) throw InputError("ranks file has no criterion columns");
    auto ids = detail::read_ids(t, "model");
    std::vector<int> ranks;
    for (const auto& row : t.rows) {
        for (std::size_t col = 1; col < t.header.size(); ++col) {
            auto v = parse_int(row.cells[col]);
            if (!v) throw InputError(detail::coord(row.line, col + 1, t.header[col]) + ": cannot parse '" +
                                     row.cells[col] + "' as an integer rank");
            if (*v < 1) throw InputError(detail::coord(row.line, col + 1, t.header[col]) + ": ranks start at 1");
            ranks.push_back(*v);
        }
    }
    return RankMatrix(std::move(ids), std::vector<std::string>(t.header.begin() + 1, t.header.end()), std::move(ranks));
}

/// Reorders rank columns to follow `criteria`, rejecting undeclared or missing ones.
inline RankMatrix align_ranks(const RankMatrix& ranks, const std::vector<Criterion>& criteria) {
    std::vector<std::string> cids;
    std::vector<std::size_t> src;
    for (const auto& c : criteria) {
        auto idx = ranks.criterion_index(c.id);
        if (!idx) throw InputError("missing column for criterion '" + c.id + "'");
        cids.push_back(c.id);
        src.push_back(*idx);
    }
    if (cids.size() != ranks.criterion_count()) {
        for (const auto& id : ranks.criterion_ids())
            if (std::find(cids.begin(), cids.end(), id) == cids.end())
                throw InputError("ranks column '" + id + "' is not a declared criterion");
    }
    std::vector<int> out;
    for (std::size_t m = 0; m < ranks.model_count(); ++m)
        for (auto c : src) out.push_back(ranks.at(m, c));
    return RankMatrix(ranks.model_ids(), std::move(cids), std::move(out));
}

namespace detail {

inline bool needs_quotes(std::string_view s) {
    return s.find_first_of(",\"\n\r") != std::string_view::npos || (!s.empty() && (s.front() == ' ' || s.back() == ' ')) ||
           s.empty();
}

inline std::string csv_cell(std::string_view s) {
    if (!needs_quotes(s)) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

inline std::string ranks_to_csv(const RankMatrix& ranks) {
    std::string out = "model_id";
    for (const auto& c : ranks.criterion_ids()) out += "," + detail::csv_cell(c);
    out += '\n';
    for (std::size_t m = 0; m < ranks.model_count(); ++m) {
        out += detail::csv_cell(ranks.model_ids()[m]);
        for (int r : ranks.row(m)) out += "," + std::to_string(r);
        out += '\n';
    }
    return out;
}

/// Sensitivity configs: array of {"label": text, "modes": {criterion id: mode}}.
/// Each config must assign a mode to every criterion.
inline std::vector<SensitivityConfig> parse_sensitivity_configs(std::string_view text,
                                                                const std::vector<Criterion>& criteria) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("malformed configs JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ConfigError("configs JSON must be a top-level array");
    if (doc.empty()) throw ConfigError("configs file lists no configurations");
    std::vector<SensitivityConfig> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        const std::string where = "config #" + std::to_string(i) + ": ";
        if (!item.is_object() || !item.contains("modes") || !item["modes"].is_object())
            throw ConfigError(where + "expected an object with a 'modes' object");
        SensitivityConfig cfg;
        cfg.label = item.contains("label") && item["label"].is_string() ? item["label"].get<std::string>()
                                                                         : "config-" + std::to_string(i);
        const auto& modes = item["modes"];
        for (auto it = modes.begin(); it != modes.end(); ++it) {
            bool known = std::any_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.id == it.key(); });
            if (!known) throw ConfigError(where + "unknown criterion '" + it.key() + "'");
        }
        for (const auto& c : criteria) {
            if (!modes.contains(c.id)) throw ConfigError(where + "no mode for criterion '" + c.id + "'");
            try {
                cfg.modes.push_back(detail::mode_from_json(modes[c.id]));
            } catch (const InputError& e) {
                throw ConfigError(where + "criterion '" + c.id + "': " + e.what());
            }
        }
        out.push_back(std::move(cfg));
    }
    return out;
}

struct PoolSpec {
    std::vector<Variable> variables;
    std::vector<std::string> protected_columns;
};

/// Pool sidecar: {"variables": [{"name", "direction"}], "protected": [column names]}.
inline PoolSpec parse_pool_spec(std::string_view text) {
    auto doc = detail::parse_json(text, "pool spec");
    if (!doc.is_object()) throw InputError("pool spec must be a JSON object");
    if (!doc.contains("variables") || !doc["variables"].is_array() || doc["variables"].empty())
        throw InputError("pool spec needs a non-empty 'variables' array");
    PoolSpec spec;
    for (std::size_t i = 0; i < doc["variables"].size(); ++i) {
        const auto& v = doc["variables"][i];
        try {
            if (!v.is_object()) throw InputError("entry is not an object");
            Variable var;
            var.name = detail::string_field(v, "name");
            auto dir = parse_direction(detail::string_field(v, "direction"));
            if (!dir) throw InputError("direction must be 'lower_is_better' or 'higher_is_better'");
            var.direction = *dir;
            spec.variables.push_back(std::move(var));
        } catch (const InputError& e) {
            throw InputError("pool spec variable " + std::to_string(i) + ": " + e.what());
        }
    }
    if (doc.contains("protected")) {
        if (!doc["protected"].is_array()) throw InputError("pool spec 'protected' must be an array of column names");
        for (const auto& p : doc["protected"]) {
            if (!p.is_string()) throw InputError("pool spec 'protected' entries must be strings");
            spec.protected_columns.push_back(p.get<std::string>());
        }
    }
    return spec;
}

struct PoolParse {
    CandidatePool pool;
    std::vector<std::string> warnings;
};

inline PoolParse parse_pool(std::string_view csv_text, const PoolSpec& spec) {
    auto t = detail::read_table(csv_text, "candidate pool", "no candidates");
    std::vector<bool> used(t.header.size(), false);
    std::vector<std::size_t> vcols, pcols;
    for (const auto& v : spec.variables) {
        vcols.push_back(detail::require_column(t, v.name, "variable"));
        used[vcols.back()] = true;
    }
    for (const auto& p : spec.protected_columns) {
        pcols.push_back(detail::require_column(t, p, "protected attribute"));
        if (used[pcols.back()]) throw InputError("column '" + p + "' is declared both as a variable and as protected");
        used[pcols.back()] = true;
    }
    auto ids = detail::read_ids(t, "candidate");
    std::vector<double> values;
    std::vector<std::string> labels;
    for (const auto& row : t.rows) {
        for (auto col : vcols) values.push_back(detail::read_real(t, row, col));
        for (auto col : pcols) {
            if (row.cells[col].empty())
                throw InputError(detail::coord(row.line, col + 1, t.header[col]) + ": missing protected attribute");
            labels.push_back(row.cells[col]);
        }
    }
    PoolParse out{CandidatePool(std::move(ids), spec.variables, std::move(values), spec.protected_columns,
                                std::move(labels)),
                  {}};
    detail::warn_unused(t, used, out.warnings);
    return out;
}

} // namespace mcc
