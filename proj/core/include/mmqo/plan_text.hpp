#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mmqo/errors.hpp"
#include "mmqo/plan.hpp"

namespace mmqo {

/// Parses a plan document: a JSON object with keys "Operator", "Left_child"
/// and "Right_child" per node; an absent child is null. Operator strings
/// follow the textual grammar:
///
///   TableScan(T)
///   Select(T.col <comp> <value> [AND ...])        comp: = != < <= > >=
///   Join(T.col = U.col)
///   Object detection(T.col: are there XXX [AND YYY ...]?)
///   Object counting(T.col: how many XXX are there?: <threshold>)
///
/// Values are decimal numbers or single-quoted strings; ordering comparators
/// require numeric values. Keyword matching is case-insensitive and a bare
/// identifier (no parentheses) is accepted as a table scan, so plans written
/// in the loose style produced by language models still parse. A JSON string
/// in a child position is likewise taken as a scan leaf. Arity violations
/// (for example a join with one child) are NOT rejected here; the error
/// monitor diagnoses them.
///
/// Throws ParseError on malformed JSON or an operator string that cannot be
/// read or is not fully consumed.
PlanPtr parse_plan(const std::string &text);

/// Inverse of parse_plan. Deterministic: fixed key order, compact layout,
/// predicates and objects in stored order. parse_plan(serialize_plan(p))
/// reproduces p for well-formed plans.
std::string serialize_plan(const PlanNode &plan);
std::string serialize_plan(const PlanPtr &plan);

/// Same document with two-space indentation, for logs and reports.
std::string serialize_plan_pretty(const PlanNode &plan);

/// Renders one operator in the textual grammar above.
std::string render_operator(const Operator &op);

/// Parses one operator string (the "Operator" value of a node).
Operator parse_operator_string(const std::string &text);

/// Canonical form used for plan identity (vote keys, dedup, tie-breaks):
/// select predicates sorted, object phrases lowercased / whitespace-squeezed
/// and sorted, join children ordered by their serialized form with the keys
/// swapped along. Idempotent; preserves the operator census and the cost.
PlanPtr canonicalize(const PlanNode &plan);
PlanPtr canonicalize(const PlanPtr &plan);

/// serialize_plan(canonicalize(plan)) — the string the vote and dedup logic
/// keys on.
std::string canonical_key(const PlanNode &plan);
std::string canonical_key(const PlanPtr &plan);

/// Lowercases and squeezes runs of whitespace; object phrases are compared
/// in this form.
std::string normalize_phrase(std::string_view phrase);

/// Splits a detection question into object phrases: strips the
/// interrogative head ("are there", "is there"), leading articles and the
/// trailing question mark, then splits on the standalone uppercase AND.
std::vector<std::string> question_to_phrases(std::string_view question);

} // namespace mmqo
