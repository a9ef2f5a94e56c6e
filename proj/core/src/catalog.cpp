#include "mmqo/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "mmqo/errors.hpp"

namespace mmqo {

namespace {

using ordered_json = nlohmann::ordered_json;

bool contains_folded(const std::vector<std::string> &names, std::string_view needle) {
    return std::any_of(names.begin(), names.end(),
                       [&](const std::string &n) { return same_identifier(n, needle); });
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << text;
}

} // namespace

bool TableStats::has_column(std::string_view column) const {
    return contains_folded(columns, column);
}

bool TableStats::is_unique(std::string_view column) const {
    return contains_folded(unique_columns, column);
}

bool TableStats::is_image(std::string_view column) const {
    return contains_folded(image_columns, column);
}

void Catalog::add_table(std::string name, TableStats stats) {
    std::string key = fold_identifier(name);
    for (const auto &col : stats.unique_columns) {
        if (!stats.has_column(col))
            throw ConfigError("table " + name + ": unique column " + col + " is not a column");
    }
    for (const auto &col : stats.image_columns) {
        if (!stats.has_column(col))
            throw ConfigError("table " + name + ": image column " + col + " is not a column");
    }
    if (stats.row_count < 0) throw ConfigError("table " + name + ": negative row count");
    if (!tables_.count(key)) names_.push_back(name);
    spelling_[key] = name;
    tables_[key] = std::move(stats);
}

const TableStats *Catalog::find(std::string_view table) const {
    auto it = tables_.find(fold_identifier(table));
    return it == tables_.end() ? nullptr : &it->second;
}

bool Catalog::has_column(std::string_view table, std::string_view column) const {
    const TableStats *stats = find(table);
    return stats && stats->has_column(column);
}

bool Catalog::is_image_column(std::string_view table, std::string_view column) const {
    const TableStats *stats = find(table);
    return stats && stats->is_image(column);
}

std::vector<std::string> Catalog::joinable_with(std::string_view table) const {
    std::vector<std::string> out;
    for (const auto &name : names_) {
        if (same_identifier(name, table)) continue;
        if (!shared_columns(table, name).empty()) out.push_back(name);
    }
    return out;
}

std::vector<std::string> Catalog::shared_columns(std::string_view a, std::string_view b) const {
    std::vector<std::string> out;
    const TableStats *sa = find(a);
    const TableStats *sb = find(b);
    if (!sa || !sb) return out;
    for (const auto &col : sa->columns) {
        if (sb->has_column(col)) out.push_back(col);
    }
    return out;
}

std::string Catalog::to_json_text() const {
    ordered_json doc = ordered_json::object();
    for (const auto &name : names_) {
        const TableStats &stats = *find(name);
        ordered_json t;
        t["row_count"] = stats.row_count;
        t["columns"] = stats.columns;
        t["unique_columns"] = stats.unique_columns;
        t["image_columns"] = stats.image_columns;
        doc[name] = std::move(t);
    }
    return doc.dump(2);
}

Catalog Catalog::from_json_text(const std::string &text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("catalog: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("catalog: expected a JSON object of tables");
    Catalog catalog;
    for (auto &[name, t] : doc.items()) {
        TableStats stats;
        stats.row_count = t.value("row_count", std::int64_t{0});
        stats.columns = t.value("columns", std::vector<std::string>{});
        stats.unique_columns = t.value("unique_columns", std::vector<std::string>{});
        stats.image_columns = t.value("image_columns", std::vector<std::string>{});
        catalog.add_table(name, std::move(stats));
    }
    return catalog;
}

Catalog Catalog::load_file(const std::string &path) {
    return from_json_text(read_file(path));
}

void Catalog::save_file(const std::string &path) const {
    write_file(path, to_json_text());
}

double CostParams::rho_for(OperatorKind kind) const {
    auto it = rho.find(kind);
    return it == rho.end() ? 0.0 : it->second;
}

double CostParams::alpha_for(OperatorKind kind) const {
    auto it = alpha.find(kind);
    return it == alpha.end() ? 1.0 : it->second;
}

void CostParams::validate() const {
    const OperatorKind order[] = {OperatorKind::Select, OperatorKind::Join,
                                  OperatorKind::ObjectDetection, OperatorKind::ObjectCounting};
    for (OperatorKind kind : order) {
        if (rho_for(kind) <= 0)
            throw ConfigError(std::string("cost params: rho[") + std::string(kind_name(kind)) +
                              "] must be positive");
        double a = alpha_for(kind);
        if (a <= 0 || a > 1)
            throw ConfigError(std::string("cost params: alpha[") + std::string(kind_name(kind)) +
                              "] must be in (0,1]");
    }
    for (std::size_t i = 1; i < 4; ++i) {
        if (!(rho_for(order[i - 1]) < rho_for(order[i])))
            throw ConfigError("cost params: rho must satisfy "
                              "Select < Join < ObjectDetection < ObjectCounting");
    }
}

CostParams CostParams::defaults() {
    CostParams params;
    params.rho = {
        {OperatorKind::Select, 1.0},
        {OperatorKind::Join, 5.0},
        {OperatorKind::ObjectDetection, 100.0},
        {OperatorKind::ObjectCounting, 200.0},
    };
    // ObjectDetection keeps enough of its input (0.6) that dropping a
    // detection subsumed by a counting lowers the total cost.
    params.alpha = {
        {OperatorKind::Select, 0.5},
        {OperatorKind::Join, 0.8},
        {OperatorKind::ObjectDetection, 0.6},
        {OperatorKind::ObjectCounting, 0.3},
    };
    return params;
}

std::string CostParams::to_json_text() const {
    ordered_json doc;
    ordered_json rho_obj = ordered_json::object();
    ordered_json alpha_obj = ordered_json::object();
    for (const auto &[kind, value] : rho) rho_obj[std::string(kind_name(kind))] = value;
    for (const auto &[kind, value] : alpha) alpha_obj[std::string(kind_name(kind))] = value;
    doc["rho"] = std::move(rho_obj);
    doc["alpha"] = std::move(alpha_obj);
    return doc.dump(2);
}

CostParams CostParams::from_json_text(const std::string &text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("cost params: ") + e.what());
    }
    CostParams params = defaults();
    auto read_map = [&](const char *key, std::map<OperatorKind, double> &target) {
        if (!doc.contains(key)) return;
        for (auto &[name, value] : doc[key].items()) {
            auto kind = kind_from_name(name);
            if (!kind) throw ConfigError("cost params: unknown operator kind " + name);
            target[*kind] = value.get<double>();
        }
    };
    read_map("rho", params.rho);
    read_map("alpha", params.alpha);
    params.validate();
    return params;
}

CostParams CostParams::load_file(const std::string &path) {
    return from_json_text(read_file(path));
}

void CostParams::save_file(const std::string &path) const {
    write_file(path, to_json_text());
}

} // namespace mmqo
