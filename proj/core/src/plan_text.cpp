#include "mmqo/plan_text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <tuple>

#include "json.hpp"

namespace mmqo {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_identifier(std::string_view text) {
    if (text.empty()) return false;
    return std::all_of(text.begin(), text.end(), [](char c) { return is_ident_char(c); });
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    return text;
}

std::string lower(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (unsigned char c : text) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

/// Keyword head normalized for dispatch: lowercased, spaces and underscores
/// removed ("Object Counting" -> "objectcounting").
std::string normalize_head(std::string_view head) {
    std::string out;
    for (unsigned char c : head) {
        if (c == ' ' || c == '_' || c == '\t') continue;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

/// Cursor over one operator string; offsets in errors are relative to it.
class OpCursor {
  public:
    OpCursor(std::string_view text, std::size_t base) : text_(text), base_(base) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    [[noreturn]] void fail(const std::string &what) const {
        throw ParseError("operator string: " + what, base_ + pos_);
    }

    std::string parse_identifier() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        if (pos_ == start) fail("expected identifier");
        return std::string(text_.substr(start, pos_ - start));
    }

    ColumnRef parse_column_ref() {
        std::string table = parse_identifier();
        if (peek() != '.') fail("expected '.' in column reference");
        ++pos_;
        std::string column = parse_identifier();
        return ColumnRef{std::move(table), std::move(column)};
    }

    Comparator parse_comparator() {
        skip_ws();
        static constexpr std::string_view symbols[] = {"!=", "<=", ">=", "=", "<", ">"};
        for (std::string_view sym : symbols) {
            if (text_.substr(pos_).starts_with(sym)) {
                pos_ += sym.size();
                return *comparator_from_symbol(sym);
            }
        }
        fail("expected comparator");
    }

    Literal parse_value() {
        skip_ws();
        char c = peek();
        if (c == '\'' || c == '"') return parse_quoted_string(c);
        return parse_number();
    }

    Literal parse_quoted_string(char quote) {
        ++pos_; // opening quote
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != quote) ++pos_;
        if (pos_ >= text_.size()) fail("unterminated string literal");
        std::string value(text_.substr(start, pos_ - start));
        ++pos_; // closing quote
        return string_literal(std::move(value));
    }

    Literal parse_number() {
        skip_ws();
        std::size_t start = pos_;
        if (peek() == '-' || peek() == '+') ++pos_;
        bool digits = false, decimal = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits = true;
                ++pos_;
            } else if (c == '.' && !decimal) {
                decimal = true;
                ++pos_;
            } else if ((c == 'e' || c == 'E') && digits) {
                decimal = true;
                ++pos_;
                if (peek() == '-' || peek() == '+') ++pos_;
            } else {
                break;
            }
        }
        if (!digits) fail("expected numeric or quoted value");
        std::string_view body = text_.substr(start, pos_ - start);
        if (!decimal) {
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
            if (ec != std::errc() || ptr != body.data() + body.size())
                fail("integer literal out of range");
            return int_literal(v);
        }
        double v = 0;
        auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
        if (ec != std::errc() || ptr != body.data() + body.size()) fail("bad decimal literal");
        return decimal_literal(v);
    }

    std::int64_t parse_threshold() {
        Literal lit = parse_number();
        if (auto *i = std::get_if<std::int64_t>(&lit.value)) return *i;
        fail("threshold must be an integer");
    }

    /// Case-insensitive keyword at a word boundary.
    bool try_keyword(std::string_view keyword) {
        skip_ws();
        if (text_.size() - pos_ < keyword.size()) return false;
        for (std::size_t i = 0; i < keyword.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(text_[pos_ + i])) !=
                std::tolower(static_cast<unsigned char>(keyword[i])))
                return false;
        }
        std::size_t after = pos_ + keyword.size();
        if (after < text_.size() && is_ident_char(text_[after])) return false;
        pos_ = after;
        return true;
    }

    std::size_t position() const { return pos_; }

  private:
    std::string_view text_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

SimplePredicate parse_predicate(OpCursor &cur) {
    SimplePredicate pred;
    pred.target = cur.parse_column_ref();
    pred.comparator = cur.parse_comparator();
    pred.value = cur.parse_value();
    if (is_ordering(pred.comparator) && !pred.value.is_numeric())
        cur.fail("ordering comparator requires a numeric value");
    return pred;
}

std::vector<SimplePredicate> parse_predicate_list(std::string_view body, std::size_t base) {
    OpCursor cur(body, base);
    std::vector<SimplePredicate> preds;
    preds.push_back(parse_predicate(cur));
    while (!cur.at_end()) {
        if (!cur.try_keyword("AND")) cur.fail("expected AND between predicates");
        preds.push_back(parse_predicate(cur));
    }
    return preds;
}

/// Drops leading articles / quantifiers from one object phrase.
std::string_view strip_articles(std::string_view phrase) {
    static constexpr std::string_view articles[] = {"any", "a", "an", "the", "both"};
    for (;;) {
        phrase = trim(phrase);
        bool stripped = false;
        for (std::string_view art : articles) {
            if (phrase.size() > art.size() &&
                same_identifier(phrase.substr(0, art.size()), art) &&
                std::isspace(static_cast<unsigned char>(phrase[art.size()]))) {
                phrase.remove_prefix(art.size());
                stripped = true;
                break;
            }
        }
        if (!stripped) return phrase;
    }
}

std::string_view strip_prefix_ci(std::string_view text, std::string_view prefix) {
    if (text.size() >= prefix.size() && same_identifier(text.substr(0, prefix.size()), prefix)) {
        std::string_view rest = text.substr(prefix.size());
        if (rest.empty() || std::isspace(static_cast<unsigned char>(rest.front())))
            return trim(rest);
    }
    return text;
}

std::string_view strip_suffix_ci(std::string_view text, std::string_view suffix) {
    if (text.size() >= suffix.size() &&
        same_identifier(text.substr(text.size() - suffix.size()), suffix)) {
        std::string_view rest = text.substr(0, text.size() - suffix.size());
        if (rest.empty() || std::isspace(static_cast<unsigned char>(rest.back())))
            return trim(rest);
    }
    return text;
}

Operator parse_detection(std::string_view body, std::size_t base) {
    std::size_t colon = body.find(':');
    if (colon == std::string_view::npos)
        throw ParseError("operator string: expected ':' after detection target", base + body.size());
    OpCursor target_cur(body.substr(0, colon), base);
    ColumnRef target = target_cur.parse_column_ref();
    if (!target_cur.at_end()) target_cur.fail("trailing input after detection target");
    std::vector<std::string> objects = question_to_phrases(body.substr(colon + 1));
    if (objects.empty())
        throw ParseError("operator string: detection question names no objects", base + colon + 1);
    return ObjectDetectionOp{std::move(target), std::move(objects)};
}

Operator parse_counting(std::string_view body, std::size_t base) {
    std::size_t colon = body.find(':');
    if (colon == std::string_view::npos)
        throw ParseError("operator string: expected ':' after counting target", base + body.size());
    OpCursor target_cur(body.substr(0, colon), base);
    ColumnRef target = target_cur.parse_column_ref();
    if (!target_cur.at_end()) target_cur.fail("trailing input after counting target");

    std::string_view rest = body.substr(colon + 1);
    std::size_t last_colon = rest.rfind(':');
    if (last_colon == std::string_view::npos)
        throw ParseError("operator string: counting needs a ': <threshold>' suffix",
                         base + body.size());

    OpCursor threshold_cur(rest.substr(last_colon + 1), base + colon + 1 + last_colon + 1);
    std::int64_t threshold = threshold_cur.parse_threshold();
    if (!threshold_cur.at_end()) threshold_cur.fail("trailing input after threshold");

    std::string_view question = trim(rest.substr(0, last_colon));
    while (!question.empty() && question.back() == '?') question.remove_suffix(1);
    question = trim(question);
    question = strip_prefix_ci(question, "how many");
    question = strip_suffix_ci(question, "are there");
    question = strip_articles(question);
    if (question.empty())
        throw ParseError("operator string: counting question names no object", base + colon + 1);
    return ObjectCountingOp{std::move(target), std::string(question), threshold};
}

std::tuple<int, double, std::string> literal_sort_key(const Literal &lit) {
    if (lit.is_numeric()) return {0, lit.as_number(), lit.render()};
    return {1, 0.0, *lit.as_string()};
}

bool predicate_less(const SimplePredicate &a, const SimplePredicate &b) {
    auto key = [](const SimplePredicate &p) {
        return std::tuple(fold_identifier(p.target.table), fold_identifier(p.target.column),
                          std::string(comparator_symbol(p.comparator)), literal_sort_key(p.value));
    };
    return key(a) < key(b);
}

ordered_json node_to_json(const PlanNode &node) {
    ordered_json j;
    j["Operator"] = render_operator(node.op);
    j["Left_child"] = node.left ? node_to_json(*node.left) : ordered_json(nullptr);
    j["Right_child"] = node.right ? node_to_json(*node.right) : ordered_json(nullptr);
    return j;
}

PlanPtr node_from_json(const ordered_json &j) {
    if (j.is_string()) {
        // Loose leaf notation: a bare table name (or operator string) in a
        // child slot.
        return make_node(parse_operator_string(j.get<std::string>()));
    }
    if (!j.is_object()) throw ParseError("plan node must be a JSON object or string", 0);
    auto op_it = j.find("Operator");
    if (op_it == j.end()) throw ParseError("plan node is missing the \"Operator\" key", 0);
    if (!op_it->is_string()) throw ParseError("\"Operator\" must be a string", 0);
    Operator op = parse_operator_string(op_it->get<std::string>());

    auto child = [&](const char *key) -> PlanPtr {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return nullptr;
        return node_from_json(*it);
    };
    PlanPtr left = child("Left_child");
    PlanPtr right = child("Right_child");
    return make_node(std::move(op), std::move(left), std::move(right));
}

} // namespace

std::string normalize_phrase(std::string_view phrase) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : phrase) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::vector<std::string> question_to_phrases(std::string_view question) {
    std::string_view q = trim(question);
    while (!q.empty() && q.back() == '?') q.remove_suffix(1);
    q = trim(q);
    static constexpr std::string_view heads[] = {"are there", "is there", "were there",
                                                 "was there"};
    for (std::string_view head : heads) {
        std::string_view stripped = strip_prefix_ci(q, head);
        if (stripped.data() != q.data() || stripped.size() != q.size()) {
            q = stripped;
            break;
        }
    }

    // Conjunctions split on the standalone uppercase AND so phrases like
    // "black and white cat" stay whole.
    std::vector<std::string> phrases;
    std::size_t start = 0;
    for (std::size_t i = 0; i + 3 <= q.size(); ++i) {
        bool boundary_before = i == 0 || std::isspace(static_cast<unsigned char>(q[i - 1]));
        bool boundary_after = i + 3 == q.size() || std::isspace(static_cast<unsigned char>(q[i + 3]));
        if (boundary_before && boundary_after && q.substr(i, 3) == "AND") {
            std::string_view piece = strip_articles(trim(q.substr(start, i - start)));
            if (!piece.empty()) phrases.emplace_back(piece);
            start = i + 3;
        }
    }
    std::string_view tail = strip_articles(trim(q.substr(start)));
    if (!tail.empty()) phrases.emplace_back(tail);
    return phrases;
}

Operator parse_operator_string(const std::string &text) {
    std::string_view trimmed = trim(text);
    if (trimmed.empty()) throw ParseError("empty operator string", 0);

    std::size_t open = trimmed.find('(');
    if (open == std::string_view::npos) {
        // Bare identifier leaf, the loose table notation.
        if (!is_identifier(trimmed))
            throw ParseError("operator string: expected '(' or a bare table name", 0);
        return TableScanOp{std::string(trimmed)};
    }

    std::size_t close = trimmed.rfind(')');
    if (close == std::string_view::npos || close < open)
        throw ParseError("operator string: missing closing ')'", trimmed.size());
    if (!trim(trimmed.substr(close + 1)).empty())
        throw ParseError("operator string: trailing input after ')'", close + 1);

    std::string head = normalize_head(trimmed.substr(0, open));
    std::string_view body = trimmed.substr(open + 1, close - open - 1);
    std::size_t body_base = open + 1;

    if (head == "tablescan" || head == "scan") {
        OpCursor cur(body, body_base);
        std::string table = cur.parse_identifier();
        if (!cur.at_end()) cur.fail("trailing input after table name");
        return TableScanOp{std::move(table)};
    }
    if (head == "select") {
        return SelectOp{parse_predicate_list(body, body_base)};
    }
    if (head == "join") {
        OpCursor cur(body, body_base);
        ColumnRef lhs = cur.parse_column_ref();
        cur.skip_ws();
        if (cur.peek() != '=') cur.fail("join expects 'T.col = U.col'");
        Comparator cmp = cur.parse_comparator();
        if (cmp != Comparator::Eq) cur.fail("only equality joins are supported");
        ColumnRef rhs = cur.parse_column_ref();
        if (!cur.at_end()) cur.fail("trailing input after join keys");
        return JoinOp{std::move(lhs), std::move(rhs)};
    }
    if (head == "objectdetection") {
        return parse_detection(body, body_base);
    }
    if (head == "objectcounting") {
        return parse_counting(body, body_base);
    }
    throw ParseError("operator string: unknown operator \"" + std::string(trimmed.substr(0, open)) +
                         "\"",
                     0);
}

std::string render_operator(const Operator &op) {
    switch (kind_of(op)) {
        case OperatorKind::TableScan:
            return "TableScan(" + std::get<TableScanOp>(op).table + ")";
        case OperatorKind::Select: {
            std::string out = "Select(";
            const auto &preds = std::get<SelectOp>(op).predicates;
            for (std::size_t i = 0; i < preds.size(); ++i) {
                if (i) out += " AND ";
                out += preds[i].target.table + "." + preds[i].target.column + " " +
                       std::string(comparator_symbol(preds[i].comparator)) + " " +
                       preds[i].value.render();
            }
            return out + ")";
        }
        case OperatorKind::Join: {
            const auto &j = std::get<JoinOp>(op);
            return "Join(" + j.left_key.table + "." + j.left_key.column + " = " +
                   j.right_key.table + "." + j.right_key.column + ")";
        }
        case OperatorKind::ObjectDetection: {
            const auto &d = std::get<ObjectDetectionOp>(op);
            std::string out =
                "Object detection(" + d.target.table + "." + d.target.column + ": are there ";
            for (std::size_t i = 0; i < d.objects.size(); ++i) {
                if (i) out += " AND ";
                out += d.objects[i];
            }
            return out + "?)";
        }
        case OperatorKind::ObjectCounting: {
            const auto &c = std::get<ObjectCountingOp>(op);
            return "Object counting(" + c.target.table + "." + c.target.column + ": how many " +
                   c.object + " are there?: " + std::to_string(c.threshold) + ")";
        }
    }
    return "?";
}

PlanPtr parse_plan(const std::string &text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(e.what(), e.byte);
    }
    return node_from_json(doc);
}

std::string serialize_plan(const PlanNode &plan) {
    return node_to_json(plan).dump();
}

std::string serialize_plan(const PlanPtr &plan) {
    return serialize_plan(*plan);
}

std::string serialize_plan_pretty(const PlanNode &plan) {
    return node_to_json(plan).dump(2);
}

PlanPtr canonicalize(const PlanNode &plan) {
    PlanPtr left = plan.left ? canonicalize(*plan.left) : nullptr;
    PlanPtr right = plan.right ? canonicalize(*plan.right) : nullptr;

    Operator op = plan.op;
    switch (kind_of(op)) {
        case OperatorKind::Select: {
            auto &sel = std::get<SelectOp>(op);
            std::sort(sel.predicates.begin(), sel.predicates.end(), predicate_less);
            break;
        }
        case OperatorKind::ObjectDetection: {
            auto &det = std::get<ObjectDetectionOp>(op);
            for (auto &obj : det.objects) obj = normalize_phrase(obj);
            std::sort(det.objects.begin(), det.objects.end());
            break;
        }
        case OperatorKind::ObjectCounting: {
            auto &cnt = std::get<ObjectCountingOp>(op);
            cnt.object = normalize_phrase(cnt.object);
            break;
        }
        case OperatorKind::Join: {
            if (left && right) {
                std::string left_text = serialize_plan(*left);
                std::string right_text = serialize_plan(*right);
                if (right_text < left_text) {
                    std::swap(left, right);
                    auto &j = std::get<JoinOp>(op);
                    std::swap(j.left_key, j.right_key);
                }
            }
            break;
        }
        case OperatorKind::TableScan:
            break;
    }
    return make_node(std::move(op), std::move(left), std::move(right));
}

PlanPtr canonicalize(const PlanPtr &plan) {
    return canonicalize(*plan);
}

std::string canonical_key(const PlanNode &plan) {
    return serialize_plan(*canonicalize(plan));
}

std::string canonical_key(const PlanPtr &plan) {
    return canonical_key(*plan);
}

} // namespace mmqo
