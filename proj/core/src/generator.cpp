#include "mmqo/generator.hpp"

#include <algorithm>
#include <random>

#include "mmqo/cost.hpp"
#include "mmqo/error_monitor.hpp"
#include "mmqo/errors.hpp"
#include "mmqo/plan_text.hpp"
#include "mmqo/similarity.hpp"

namespace mmqo {

namespace {

const std::vector<std::string> &phrase_pool() {
    static const std::vector<std::string> pool = {
        "man",  "woman", "dog",  "cat",   "tree", "car",
        "bird", "boat",  "house", "flower", "person", "child",
    };
    return pool;
}

struct ScanInfo {
    std::string table;
    bool has_image = false;
};

int draw(std::mt19937_64 &rng, int lo, int hi) { // inclusive
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

template <typename T>
const T &pick(std::mt19937_64 &rng, const std::vector<T> &items) {
    return items[rng() % items.size()];
}

/// One attempt at a random plan; nullptr when the draw dead-ends.
PlanPtr try_generate(std::mt19937_64 &rng, const Catalog &catalog, const GeneratorLimits &limits,
                     const CostParams &params) {
    const int lo = limits.min_one_of_each ? 1 : 0;
    int n_joins = draw(rng, std::max(lo, 1), limits.max_joins);
    int n_selects = draw(rng, lo, limits.max_selects);
    int n_dets = draw(rng, lo, limits.max_detections);
    int n_counts = draw(rng, lo, limits.max_countings);
    if (n_joins + n_selects + n_dets + n_counts < limits.min_operators) return nullptr;

    // join tree over distinct, pairwise-connectable tables, growing from a
    // table that owns an image column so visual operators have a target
    std::vector<std::string> image_tables;
    for (const auto &name : catalog.table_names()) {
        if (!catalog.find(name)->image_columns.empty()) image_tables.push_back(name);
    }
    if (image_tables.empty() || catalog.size() < 2) return nullptr;

    std::vector<std::string> joined{pick(rng, image_tables)};
    PlanPtr tree = scan(joined.front());
    for (int i = 0; i < n_joins; ++i) {
        struct Option {
            std::string partner, candidate, column;
        };
        std::vector<Option> options;
        for (const auto &candidate : catalog.table_names()) {
            bool already = std::any_of(joined.begin(), joined.end(), [&](const std::string &t) {
                return same_identifier(t, candidate);
            });
            if (already) continue;
            for (const auto &partner : joined) {
                for (const auto &col : catalog.shared_columns(partner, candidate)) {
                    options.push_back({partner, candidate, col});
                }
            }
        }
        if (options.empty()) return nullptr;
        const Option &opt = pick(rng, options);
        tree = join(tree, scan(opt.candidate), ColumnRef{opt.partner, opt.column},
                    ColumnRef{opt.candidate, opt.column});
        joined.push_back(opt.candidate);
    }

    std::vector<std::string> joined_with_images;
    for (const auto &t : joined) {
        if (!catalog.find(t)->image_columns.empty()) joined_with_images.push_back(t);
    }
    if ((n_dets > 0 || n_counts > 0) && joined_with_images.empty()) return nullptr;

    // wrap random subtrees with the unary operators, targets drawn from the
    // tables scanned below the insertion point
    struct PendingOp {
        Operator op;
        std::string table; // the one table the operator targets
    };
    std::vector<PendingOp> pending;

    for (int i = 0; i < n_selects; ++i) {
        const std::string &table = pick(rng, joined);
        const TableStats &stats = *catalog.find(table);
        SelectOp op;
        int clauses = draw(rng, 1, 2);
        for (int c = 0; c < clauses; ++c) {
            const std::string &column = pick(rng, stats.columns);
            static const Comparator comparators[] = {Comparator::Eq, Comparator::Ne,
                                                     Comparator::Lt, Comparator::Le,
                                                     Comparator::Gt, Comparator::Ge};
            Comparator cmp = comparators[rng() % 6];
            Literal value;
            if (!is_ordering(cmp) && rng() % 4 == 0) {
                value = string_literal("v" + std::to_string(draw(rng, 0, 9)));
            } else {
                value = int_literal(draw(rng, 0, 999));
            }
            op.predicates.push_back({ColumnRef{table, column}, cmp, value});
        }
        pending.push_back({std::move(op), table});
    }
    for (int i = 0; i < n_dets; ++i) {
        const std::string &table = pick(rng, joined_with_images);
        const TableStats &stats = *catalog.find(table);
        ObjectDetectionOp op;
        op.target = ColumnRef{table, pick(rng, stats.image_columns)};
        int objects = draw(rng, 1, 2);
        for (int o = 0; o < objects; ++o) {
            const std::string &phrase = pick(rng, phrase_pool());
            if (std::find(op.objects.begin(), op.objects.end(), phrase) == op.objects.end())
                op.objects.push_back(phrase);
        }
        pending.push_back({std::move(op), table});
    }
    for (int i = 0; i < n_counts; ++i) {
        const std::string &table = pick(rng, joined_with_images);
        const TableStats &stats = *catalog.find(table);
        ObjectCountingOp op;
        op.target = ColumnRef{table, pick(rng, stats.image_columns)};
        op.object = pick(rng, phrase_pool());
        op.threshold = draw(rng, 0, 5);
        pending.push_back({std::move(op), table});
    }
    std::shuffle(pending.begin(), pending.end(), rng);

    for (const auto &p : pending) {
        std::vector<NodePath> eligible;
        for_each_node(*tree, [&](const PlanNode &node, const NodePath &path) {
            if (subtree_contains_table(node, p.table)) eligible.push_back(path);
        });
        if (eligible.empty()) return nullptr;
        const NodePath &site = eligible[rng() % eligible.size()];
        const PlanNode *below = node_at(*tree, site);
        PlanPtr wrapped = make_node(p.op, make_node(below->op, below->left, below->right));
        tree = replace_at(tree, site, std::move(wrapped));
    }

    if (operator_census(*tree).non_scan_total() < limits.min_operators) return nullptr;
    if (plan_cost(tree, catalog, params) > limits.max_est_cost) return nullptr;
    return tree;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

PlanPtr generate_query(std::uint64_t seed, const Catalog &catalog, const GeneratorLimits &limits,
                       const CostParams &params) {
    for (int attempt = 0; attempt < limits.max_attempts; ++attempt) {
        std::mt19937_64 rng(mix(seed, static_cast<std::uint64_t>(attempt)));
        PlanPtr plan = try_generate(rng, catalog, limits, params);
        if (!plan) continue;
        if (!check_structure(*plan, catalog).empty()) continue; // belt and braces
        return plan;
    }
    throw GenerationExhaustedError("no valid query after " +
                                   std::to_string(limits.max_attempts) + " attempts (seed " +
                                   std::to_string(seed) + ")");
}

std::vector<PlanPtr> generate_corpus(std::uint64_t seed, int n, const Catalog &catalog,
                                     const GeneratorLimits &limits, const CostParams &params) {
    std::vector<PlanPtr> out;
    std::set<std::string> seen; // near-duplicate filter: canonical-form equality
    std::uint64_t next_seed = seed;
    int dry_spell = 0;
    while (static_cast<int>(out.size()) < n) {
        PlanPtr plan = generate_query(next_seed++, catalog, limits, params);
        if (seen.insert(canonical_key(plan)).second) {
            out.push_back(std::move(plan));
            dry_spell = 0;
        } else if (++dry_spell > limits.max_attempts) {
            throw GenerationExhaustedError("corpus generation stalled on duplicates");
        }
    }
    return out;
}

Catalog example_catalog() {
    Catalog catalog;
    catalog.add_table("artworks", TableStats{
                                      60000,
                                      {"artwork_id", "title", "artist_id", "year", "style",
                                       "image_path"},
                                      {"artwork_id"},
                                      {"image_path"},
                                  });
    catalog.add_table("artists", TableStats{
                                     5000,
                                     {"artist_id", "artist_name", "nationality", "birth_year"},
                                     {"artist_id"},
                                     {},
                                 });
    catalog.add_table("exhibits", TableStats{
                                      20000,
                                      {"artwork_id", "museum", "city", "year"},
                                      {},
                                      {},
                                  });
    catalog.add_table("photos", TableStats{
                                    25000,
                                    {"photo_id", "artwork_id", "image_file", "resolution"},
                                    {"photo_id"},
                                    {"image_file"},
                                });
    return catalog;
}

} // namespace mmqo
