#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmqo/plan.hpp"

namespace mmqo {

struct TableStats {
    std::int64_t row_count = 0;
    std::vector<std::string> columns;
    std::vector<std::string> unique_columns; // subset of columns
    std::vector<std::string> image_columns;  // subset of columns

    bool has_column(std::string_view column) const;
    bool is_unique(std::string_view column) const;
    bool is_image(std::string_view column) const;
};

/// Database statistics: row counts plus column metadata per table. Lookups
/// fold identifier case; original spellings are preserved for listings.
class Catalog {
  public:
    Catalog() = default;

    void add_table(std::string name, TableStats stats);

    const TableStats *find(std::string_view table) const;
    bool has_table(std::string_view table) const { return find(table) != nullptr; }
    bool has_column(std::string_view table, std::string_view column) const;
    bool is_image_column(std::string_view table, std::string_view column) const;

    /// Table names in insertion order, original spelling.
    const std::vector<std::string> &table_names() const { return names_; }
    std::size_t size() const { return names_.size(); }

    /// Tables sharing at least one column name with `table` (join partners).
    std::vector<std::string> joinable_with(std::string_view table) const;
    /// Column names present in both tables.
    std::vector<std::string> shared_columns(std::string_view a, std::string_view b) const;

    std::string to_json_text() const;
    static Catalog from_json_text(const std::string &text);
    static Catalog load_file(const std::string &path);
    void save_file(const std::string &path) const;

  private:
    std::vector<std::string> names_;
    std::map<std::string, TableStats> tables_; // keyed by folded name
    std::map<std::string, std::string> spelling_;
};

/// Per-operator cost factors (rho, abstract units per input row) and
/// selectivities (alpha, output rows over input rows).
struct CostParams {
    std::map<OperatorKind, double> rho;
    std::map<OperatorKind, double> alpha;

    double rho_for(OperatorKind kind) const;
    double alpha_for(OperatorKind kind) const;

    /// Checks the operating constraints: every alpha in (0,1] and
    /// rho[Select] < rho[Join] < rho[ObjectDetection] < rho[ObjectCounting].
    /// Throws ConfigError on violation. Called on every load from file.
    void validate() const;

    static CostParams defaults();

    std::string to_json_text() const;
    static CostParams from_json_text(const std::string &text);
    static CostParams load_file(const std::string &path);
    void save_file(const std::string &path) const;
};

} // namespace mmqo
