#include "fairmix/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmix/errors.hpp"
#include "fairmix/rng.hpp"

namespace fairmix {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(trim(cur));
    return cells;
}

bool parse_double(const std::string& cell, double* out) {
    if (cell.empty()) return false;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto res = std::from_chars(begin, end, *out);
    return res.ec == std::errc{} && res.ptr == end;
}

std::vector<std::string> string_list(const json& j, const std::string& key) {
    std::vector<std::string> out;
    if (!j.is_array()) throw SchemaError("dataset schema: '" + key + "' must be an array of column names");
    for (const auto& item : j) {
        if (!item.is_string()) throw SchemaError("dataset schema: '" + key + "' entries must be strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

// shared by parsing and loading; a schema built in code skips the parser
void check_role_overlap(const DatasetSchema& s) {
    std::set<std::string> seen;
    auto claim = [&seen](const std::string& name) {
        if (!seen.insert(name).second)
            throw SchemaError("dataset schema: column '" + name + "' assigned more than one role");
    };
    claim(s.response);
    for (const auto& c : s.sensitive_continuous) claim(c);
    for (const auto& c : s.sensitive_categorical) claim(c);
    for (const auto& c : s.other) claim(c);
    for (const auto& m : s.merge_levels) {
        if (std::find(s.sensitive_categorical.begin(), s.sensitive_categorical.end(), m.first) ==
            s.sensitive_categorical.end())
            throw SchemaError("dataset schema: merge_levels names non-categorical column '" + m.first + "'");
    }
}

}  // namespace

DatasetSchema schema_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("dataset schema: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("dataset schema: top level must be an object");

    static const std::set<std::string> known = {
        "path", "response", "sensitive_continuous", "sensitive_categorical",
        "other", "merge_levels", "split", "seed"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key()))
            throw SchemaError("dataset schema: unknown key '" + item.key() + "'");
    }

    DatasetSchema s;
    if (!j.contains("path") || !j["path"].is_string())
        throw SchemaError("dataset schema: 'path' (string) is required");
    s.path = j["path"].get<std::string>();
    if (!j.contains("response") || !j["response"].is_string())
        throw SchemaError("dataset schema: 'response' (string) is required");
    s.response = j["response"].get<std::string>();
    if (j.contains("sensitive_continuous"))
        s.sensitive_continuous = string_list(j["sensitive_continuous"], "sensitive_continuous");
    if (j.contains("sensitive_categorical"))
        s.sensitive_categorical = string_list(j["sensitive_categorical"], "sensitive_categorical");
    if (j.contains("other")) s.other = string_list(j["other"], "other");
    if (s.sensitive_continuous.empty() && s.sensitive_categorical.empty())
        throw SchemaError("dataset schema: at least one sensitive-related column is required");
    if (j.contains("split")) {
        if (!j["split"].is_number()) throw SchemaError("dataset schema: 'split' must be a number");
        s.split = j["split"].get<double>();
    }
    if (!(s.split > 0.0 && s.split < 1.0))
        throw SchemaError("dataset schema: 'split' must lie strictly between 0 and 1");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            throw SchemaError("dataset schema: 'seed' must be a nonnegative integer");
        s.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("merge_levels")) {
        const json& m = j["merge_levels"];
        if (!m.is_object()) throw SchemaError("dataset schema: 'merge_levels' must be an object");
        for (const auto& col : m.items()) {
            if (!col.value().is_object())
                throw SchemaError("dataset schema: merge_levels['" + col.key() + "'] must map level to level");
            std::map<std::string, std::string> rules;
            for (const auto& rule : col.value().items()) {
                if (!rule.value().is_string())
                    throw SchemaError("dataset schema: merge_levels['" + col.key() + "'] values must be strings");
                rules[rule.key()] = rule.value().get<std::string>();
            }
            s.merge_levels[col.key()] = std::move(rules);
        }
    }

    check_role_overlap(s);
    return s;
}

std::string schema_to_json(const DatasetSchema& schema) {
    nlohmann::ordered_json j;
    j["path"] = schema.path;
    j["response"] = schema.response;
    j["sensitive_continuous"] = schema.sensitive_continuous;
    j["sensitive_categorical"] = schema.sensitive_categorical;
    j["other"] = schema.other;
    if (!schema.merge_levels.empty()) {
        nlohmann::ordered_json m = nlohmann::ordered_json::object();
        for (const auto& col : schema.merge_levels) {
            nlohmann::ordered_json rules = nlohmann::ordered_json::object();
            for (const auto& rule : col.second) rules[rule.first] = rule.second;
            m[col.first] = rules;
        }
        j["merge_levels"] = m;
    }
    j["split"] = schema.split;
    j["seed"] = schema.seed;
    return j.dump(2);
}

DesignPartition load_csv(const DatasetSchema& schema) {
    check_role_overlap(schema);
    std::ifstream in(schema.path, std::ios::binary);
    if (!in) throw SchemaError("dataset: cannot open '" + schema.path + "'");

    std::string header_line;
    if (!std::getline(in, header_line))
        throw SchemaError("dataset: '" + schema.path + "' is empty");
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
    const std::vector<std::string> header = split_line(header_line);

    std::map<std::string, int> col_index;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
        if (header[i].empty()) throw SchemaError("dataset: empty column name in header");
        if (!col_index.emplace(header[i], i).second)
            throw SchemaError("dataset: duplicate column '" + header[i] + "'");
    }
    auto require = [&col_index](const std::string& name) {
        auto it = col_index.find(name);
        if (it == col_index.end()) throw SchemaError("dataset: missing column '" + name + "'");
        return it->second;
    };

    const int y_idx = require(schema.response);
    std::vector<int> cont_idx, cat_idx, other_idx;
    for (const auto& c : schema.sensitive_continuous) cont_idx.push_back(require(c));
    for (const auto& c : schema.sensitive_categorical) cat_idx.push_back(require(c));
    for (const auto& c : schema.other) other_idx.push_back(require(c));

    // roles must partition the header exactly
    const std::size_t assigned = 1 + cont_idx.size() + cat_idx.size() + other_idx.size();
    if (assigned != header.size()) {
        for (const auto& name : header) {
            const bool used = name == schema.response ||
                std::find(schema.sensitive_continuous.begin(), schema.sensitive_continuous.end(), name) !=
                    schema.sensitive_continuous.end() ||
                std::find(schema.sensitive_categorical.begin(), schema.sensitive_categorical.end(), name) !=
                    schema.sensitive_categorical.end() ||
                std::find(schema.other.begin(), schema.other.end(), name) != schema.other.end();
            if (!used) throw SchemaError("dataset: column '" + name + "' has no role");
        }
    }

    const int pc = static_cast<int>(cont_idx.size());
    const int pk = static_cast<int>(cat_idx.size());
    const int po = static_cast<int>(other_idx.size());

    struct RawRow {
        double y;
        std::vector<double> cont;
        std::vector<std::string> cat;
        std::vector<double> other;
    };

    DesignPartition out;
    std::vector<RawRow> rows;
    std::string line;
    long row_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++row_no;
        if (trim(line).empty()) continue;  // blank trailing lines carry no data
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            out.rejected.emplace_back(row_no, "expected " + std::to_string(header.size()) +
                                                  " fields, found " + std::to_string(cells.size()));
            continue;
        }
        RawRow r;
        std::string reason;
        auto numeric_cell = [&cells, &reason, &header](int idx, double* val) {
            if (!parse_double(cells[idx], val)) {
                reason = "column '" + header[idx] + "' is not numeric: '" + cells[idx] + "'";
                return false;
            }
            if (!std::isfinite(*val)) {
                reason = "column '" + header[idx] + "' is not finite";
                return false;
            }
            return true;
        };
        bool ok = numeric_cell(y_idx, &r.y);
        for (int j = 0; ok && j < pc; ++j) {
            double v;
            ok = numeric_cell(cont_idx[j], &v);
            if (ok) r.cont.push_back(v);
        }
        for (int j = 0; ok && j < pk; ++j) {
            std::string level = cells[cat_idx[j]];
            if (level.empty()) {
                reason = "column '" + header[cat_idx[j]] + "' is empty";
                ok = false;
                break;
            }
            auto mcol = schema.merge_levels.find(header[cat_idx[j]]);
            if (mcol != schema.merge_levels.end()) {
                auto rule = mcol->second.find(level);
                if (rule != mcol->second.end()) level = rule->second;
            }
            r.cat.push_back(std::move(level));
        }
        for (int j = 0; ok && j < po; ++j) {
            double v;
            ok = numeric_cell(other_idx[j], &v);
            if (ok) r.other.push_back(v);
        }
        if (!ok) {
            out.rejected.emplace_back(row_no, reason);
            continue;
        }
        rows.push_back(std::move(r));
    }

    const long n = static_cast<long>(rows.size());
    if (n < 2) throw SchemaError("dataset: fewer than two usable rows in '" + schema.path + "'");

    std::vector<long> order(n);
    for (long i = 0; i < n; ++i) order[i] = i;
    Rng rng = Rng(schema.seed).split("dataset-split");
    for (long i = n - 1; i > 0; --i) {
        const long j = static_cast<long>(rng.next_index(static_cast<std::uint64_t>(i + 1)));
        std::swap(order[i], order[j]);
    }
    long n_train = std::lround(schema.split * static_cast<double>(n));
    n_train = std::max(1L, std::min(n - 1, n_train));

    // level maps come from the training rows only; one reserved trailing code
    // per column absorbs levels that first appear in the test split
    out.level_names.assign(pk, {});
    out.arities.assign(pk, 0);
    for (int j = 0; j < pk; ++j) {
        std::set<std::string> levels;
        for (long i = 0; i < n_train; ++i) levels.insert(rows[order[i]].cat[j]);
        out.level_names[j].assign(levels.begin(), levels.end());
        out.arities[j] = static_cast<int>(levels.size()) + 1;
    }

    std::vector<long> unseen_count(pk, 0);
    auto encode = [&](const RawRow& r, int j) {
        const auto& names = out.level_names[j];
        auto it = std::lower_bound(names.begin(), names.end(), r.cat[j]);
        if (it != names.end() && *it == r.cat[j])
            return static_cast<int>(it - names.begin()) + 1;
        ++unseen_count[j];
        return out.arities[j];  // reserved code
    };

    auto fill = [&](long begin, long count) {
        SplitData s;
        s.y.resize(count);
        s.xa_cont.resize(count, pc);
        s.xa_cat.resize(count, pk);
        s.other.resize(count, po);
        for (long i = 0; i < count; ++i) {
            const RawRow& r = rows[order[begin + i]];
            s.y(i) = r.y;
            for (int j = 0; j < pc; ++j) s.xa_cont(i, j) = r.cont[j];
            for (int j = 0; j < pk; ++j) s.xa_cat(i, j) = encode(r, j);
            for (int j = 0; j < po; ++j) s.other(i, j) = r.other[j];
        }
        return s;
    };
    out.train = fill(0, n_train);
    out.test = fill(n_train, n - n_train);

    for (int j = 0; j < pk; ++j) {
        if (unseen_count[j] > 0)
            out.warnings.push_back("column '" + schema.sensitive_categorical[j] + "': " +
                                   std::to_string(unseen_count[j]) +
                                   " test rows use levels unseen in training; coded as the reserved level");
    }
    if (!out.rejected.empty())
        out.warnings.push_back(std::to_string(out.rejected.size()) + " rows rejected");
    return out;
}

}  // namespace fairmix
