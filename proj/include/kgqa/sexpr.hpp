// Copyright 2026 the kgqa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgqa/common.hpp"
#include "kgqa/kg.hpp"

namespace kgqa {

enum class NodeKind { entity, literal, relation, join, reverse, conj, count, argmax, argmin, compare };
enum class CompareOp { lt, le, gt, ge };

inline const char* compare_op_token(CompareOp op) {
    switch (op) {
        case CompareOp::lt: return "lt";
        case CompareOp::le: return "le";
        case CompareOp::gt: return "gt";
        case CompareOp::ge: return "ge";
    }
    return "lt";
}

/// S-expression logical form. Set expressions denote answer sets; relation
/// expressions are a relation id optionally wrapped in (R ...) to flip the
/// traversal direction.
struct SExpr {
    NodeKind kind = NodeKind::entity;
    std::string text;      // entity id/label, literal value, or relation id
    std::string datatype;  // optional, literals only
    CompareOp op = CompareOp::lt;
    std::vector<SExpr> children;

    bool operator==(const SExpr&) const = default;

    static SExpr entity(std::string id) { return {NodeKind::entity, std::move(id), "", CompareOp::lt, {}}; }
    static SExpr literal(std::string v, std::string dt = "") {
        return {NodeKind::literal, std::move(v), std::move(dt), CompareOp::lt, {}};
    }
    static SExpr relation(std::string r) { return {NodeKind::relation, std::move(r), "", CompareOp::lt, {}}; }
    static SExpr reverse(SExpr rel) { return {NodeKind::reverse, "", "", CompareOp::lt, {std::move(rel)}}; }
    static SExpr join(SExpr rel, SExpr set) {
        return {NodeKind::join, "", "", CompareOp::lt, {std::move(rel), std::move(set)}};
    }
    static SExpr conj(SExpr a, SExpr b) {
        return {NodeKind::conj, "", "", CompareOp::lt, {std::move(a), std::move(b)}};
    }
    static SExpr count(SExpr s) { return {NodeKind::count, "", "", CompareOp::lt, {std::move(s)}}; }
    static SExpr argmax(SExpr s, SExpr rel) {
        return {NodeKind::argmax, "", "", CompareOp::lt, {std::move(s), std::move(rel)}};
    }
    static SExpr argmin(SExpr s, SExpr rel) {
        return {NodeKind::argmin, "", "", CompareOp::lt, {std::move(s), std::move(rel)}};
    }
    static SExpr compare(CompareOp op, SExpr rel, SExpr lit) {
        return {NodeKind::compare, "", "", op, {std::move(rel), std::move(lit)}};
    }

    bool is_leaf() const {
        return kind == NodeKind::entity || kind == NodeKind::literal || kind == NodeKind::relation;
    }
    bool is_relation_expr() const { return kind == NodeKind::relation || kind == NodeKind::reverse; }
    bool is_set_expr() const { return !is_relation_expr(); }
};

class ParseError : public Error {
public:
    ParseError(std::string code, const std::string& message, size_t offset)
        : Error(std::move(code), message + " at offset " + std::to_string(offset)),
          offset_(offset) {}
    size_t offset() const noexcept { return offset_; }

private:
    size_t offset_;
};

namespace detail {

struct Token {
    enum Kind { lparen, rparen, atom, end } kind;
    std::string text;      // atom payload (unescaped for quoted atoms)
    std::string datatype;  // ^^suffix of a quoted atom
    bool quoted = false;
    size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ >= src_.size()) return {Token::end, "", "", false, pos_};
        size_t start = pos_;
        char c = src_[pos_];
        if (c == '(') { ++pos_; return {Token::lparen, "(", "", false, start}; }
        if (c == ')') { ++pos_; return {Token::rparen, ")", "", false, start}; }
        if (c == '"') return quoted_atom(start);
        std::string text;
        while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
               src_[pos_] != '(' && src_[pos_] != ')' && src_[pos_] != '"')
            text.push_back(src_[pos_++]);
        return {Token::atom, std::move(text), "", false, start};
    }

private:
    Token quoted_atom(size_t start) {
        ++pos_;  // opening quote
        std::string text;
        while (true) {
            if (pos_ >= src_.size())
                throw ParseError("unterminated-string", "missing closing quote", src_.size());
            char c = src_[pos_++];
            if (c == '\\' && pos_ < src_.size()) {
                text.push_back(src_[pos_++]);
                continue;
            }
            if (c == '"') break;
            text.push_back(c);
        }
        std::string dt;
        if (pos_ + 1 < src_.size() && src_[pos_] == '^' && src_[pos_ + 1] == '^') {
            pos_ += 2;
            while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
                   src_[pos_] != '(' && src_[pos_] != ')')
                dt.push_back(src_[pos_++]);
        }
        return {Token::atom, std::move(text), std::move(dt), true, start};
    }

    std::string_view src_;
    size_t pos_ = 0;
};

}  // namespace detail

/// Parser for the S-expression grammar.
///
/// Leaf classification in set positions: quoted atoms and whole-string
/// numerics are literals, anything else is an entity. A run of two or more
/// bare atoms in the final argument of an operator is merged into a single
/// entity leaf, which is how labelized forms such as
/// (JOIN (R r) Barack Obama) round-trip through serialize.
class SExprParser {
public:
    static SExpr parse(std::string_view text) {
        SExprParser p(text);
        SExpr root = p.parse_set(p.take());
        if (!root.is_set_expr())
            throw ParseError("relation-at-root", "a relation expression is not a query", 0);
        detail::Token t = p.take();
        if (t.kind != detail::Token::end)
            throw ParseError("trailing-input", "unexpected token '" + t.text + "'", t.offset);
        return root;
    }

private:
    explicit SExprParser(std::string_view text) : lexer_(text), size_(text.size()) {}

    detail::Token take() {
        if (peeked_) {
            peeked_ = false;
            return std::move(peek_);
        }
        return lexer_.next();
    }

    const detail::Token& peek() {
        if (!peeked_) {
            peek_ = lexer_.next();
            peeked_ = true;
        }
        return peek_;
    }

    struct RawArg {
        std::optional<SExpr> expr;    // present for compound args
        detail::Token atom;           // valid when !expr
        bool is_atom() const { return !expr.has_value(); }
    };

    SExpr parse_set(detail::Token t) {
        if (t.kind == detail::Token::atom) return classify_leaf(t);
        if (t.kind != detail::Token::lparen)
            throw ParseError("unbalanced-parens", "expected expression", offset_of(t));
        return parse_form(t.offset);
    }

    SExpr parse_form(size_t open_offset) {
        detail::Token head = take();
        if (head.kind != detail::Token::atom || head.quoted)
            throw ParseError("unknown-operator", "expected operator after '('",
                             head.kind == detail::Token::end ? size_ : head.offset);
        std::vector<RawArg> args = collect_args(open_offset);
        const std::string& op = head.text;

        if (op == "JOIN") {
            require_min_arity(args, 2, head);
            SExpr rel = to_relation(args[0], head);
            return SExpr::join(std::move(rel), merge_set(args, 1, head));
        }
        if (op == "R") {
            require_arity(args, 1, head);
            return SExpr::reverse(to_relation(args[0], head));
        }
        if (op == "AND") {
            require_min_arity(args, 2, head);
            SExpr first = to_set(args[0], head);
            return SExpr::conj(std::move(first), merge_set(args, 1, head));
        }
        if (op == "COUNT") {
            require_min_arity(args, 1, head);
            return SExpr::count(merge_set(args, 0, head));
        }
        if (op == "ARGMAX" || op == "ARGMIN") {
            require_min_arity(args, 2, head);
            SExpr rel = to_relation(args.back(), head);
            args.pop_back();
            SExpr set = merge_set(args, 0, head);
            return op == "ARGMAX" ? SExpr::argmax(std::move(set), std::move(rel))
                                  : SExpr::argmin(std::move(set), std::move(rel));
        }
        if (op == "lt" || op == "le" || op == "gt" || op == "ge") {
            require_arity(args, 2, head);
            SExpr rel = to_relation(args[0], head);
            SExpr lit = args[1].is_atom() ? classify_leaf(args[1].atom) : *args[1].expr;
            if (lit.kind != NodeKind::literal)
                throw ParseError("compare-literal-expected",
                                 "comparison needs a literal right-hand side", head.offset);
            CompareOp cop = op == "lt"   ? CompareOp::lt
                            : op == "le" ? CompareOp::le
                            : op == "gt" ? CompareOp::gt
                                         : CompareOp::ge;
            return SExpr::compare(cop, std::move(rel), std::move(lit));
        }
        throw ParseError("unknown-operator", "'" + op + "'", head.offset);
    }

    std::vector<RawArg> collect_args(size_t open_offset) {
        std::vector<RawArg> args;
        while (true) {
            const detail::Token& t = peek();
            if (t.kind == detail::Token::rparen) {
                take();
                return args;
            }
            if (t.kind == detail::Token::end)
                throw ParseError("unbalanced-parens",
                                 "'(' at offset " + std::to_string(open_offset) + " never closed",
                                 size_);
            detail::Token tok = take();
            if (tok.kind == detail::Token::lparen) {
                args.push_back(RawArg{parse_form(tok.offset), {}});
            } else {
                args.push_back(RawArg{std::nullopt, std::move(tok)});
            }
        }
    }

    // Args from `from` to the end must form exactly one set expression;
    // several trailing bare atoms merge into one entity leaf.
    SExpr merge_set(const std::vector<RawArg>& args, size_t from, const detail::Token& head) {
        size_t n = args.size() - from;
        if (n == 1) return to_set(args[from], head);
        for (size_t i = from; i < args.size(); ++i)
            if (!args[i].is_atom() || args[i].atom.quoted)
                throw ParseError("arity-mismatch",
                                 "operator '" + head.text + "' has too many arguments", head.offset);
        std::string merged;
        for (size_t i = from; i < args.size(); ++i) {
            if (!merged.empty()) merged.push_back(' ');
            merged += args[i].atom.text;
        }
        return SExpr::entity(std::move(merged));
    }

    SExpr to_set(const RawArg& a, const detail::Token& head) {
        SExpr e = a.is_atom() ? classify_leaf(a.atom) : *a.expr;
        if (!e.is_set_expr())
            throw ParseError("arity-mismatch",
                             "operator '" + head.text + "' expected a set expression", head.offset);
        return e;
    }

    SExpr to_relation(const RawArg& a, const detail::Token& head) {
        if (a.is_atom()) {
            if (a.atom.quoted)
                throw ParseError("relation-expected", "quoted atom in relation position",
                                 a.atom.offset);
            return SExpr::relation(a.atom.text);
        }
        if (!a.expr->is_relation_expr())
            throw ParseError("relation-expected",
                             "operator '" + head.text + "' expected a relation expression",
                             head.offset);
        return *a.expr;
    }

    static SExpr classify_leaf(const detail::Token& t) {
        if (t.quoted) return SExpr::literal(t.text, t.datatype);
        if (str::is_numeric(t.text)) return SExpr::literal(t.text);
        return SExpr::entity(t.text);
    }

    void require_arity(const std::vector<RawArg>& args, size_t n, const detail::Token& head) {
        if (args.size() != n)
            throw ParseError("arity-mismatch",
                             "operator '" + head.text + "' expects " + std::to_string(n) +
                                 " arguments, got " + std::to_string(args.size()),
                             head.offset);
    }

    void require_min_arity(const std::vector<RawArg>& args, size_t n, const detail::Token& head) {
        if (args.size() < n)
            throw ParseError("arity-mismatch",
                             "operator '" + head.text + "' expects at least " + std::to_string(n) +
                                 " arguments, got " + std::to_string(args.size()),
                             head.offset);
    }

    size_t offset_of(const detail::Token& t) const {
        return t.kind == detail::Token::end ? size_ : t.offset;
    }

    detail::Lexer lexer_;
    size_t size_;
    detail::Token peek_{};
    bool peeked_ = false;
};

inline SExpr parse_sexpr(std::string_view text) { return SExprParser::parse(text); }

namespace detail {
inline void serialize_into(const SExpr& f, std::string& out) {
    switch (f.kind) {
        case NodeKind::entity:
            out += f.text;
            return;
        case NodeKind::literal: {
            if (f.datatype.empty() && str::is_numeric(f.text)) {
                out += f.text;
                return;
            }
            out.push_back('"');
            for (char c : f.text) {
                if (c == '"' || c == '\\') out.push_back('\\');
                out.push_back(c);
            }
            out.push_back('"');
            if (!f.datatype.empty()) {
                out += "^^";
                out += f.datatype;
            }
            return;
        }
        case NodeKind::relation:
            out += f.text;
            return;
        case NodeKind::reverse:
            out += "(R ";
            serialize_into(f.children[0], out);
            out.push_back(')');
            return;
        case NodeKind::join:
        case NodeKind::conj:
        case NodeKind::argmax:
        case NodeKind::argmin: {
            out.push_back('(');
            out += f.kind == NodeKind::join     ? "JOIN"
                   : f.kind == NodeKind::conj   ? "AND"
                   : f.kind == NodeKind::argmax ? "ARGMAX"
                                                : "ARGMIN";
            for (const auto& c : f.children) {
                out.push_back(' ');
                serialize_into(c, out);
            }
            out.push_back(')');
            return;
        }
        case NodeKind::count:
            out += "(COUNT ";
            serialize_into(f.children[0], out);
            out.push_back(')');
            return;
        case NodeKind::compare:
            out.push_back('(');
            out += compare_op_token(f.op);
            out.push_back(' ');
            serialize_into(f.children[0], out);
            out.push_back(' ');
            serialize_into(f.children[1], out);
            out.push_back(')');
            return;
    }
}
}  // namespace detail

/// Canonical text form; parse(serialize(f)) is structurally f.
inline std::string serialize(const SExpr& f) {
    std::string out;
    detail::serialize_into(f, out);
    return out;
}

/// Throws "ill-typed" unless the tree satisfies the grammar's kind
/// constraints (relation expressions only under JOIN/R/ARGMAX/compare,
/// finite arity per kind).
inline void check_well_typed(const SExpr& f) {
    auto expect = [&](bool ok, const char* what) {
        if (!ok) throw Error("ill-typed", what);
    };
    switch (f.kind) {
        case NodeKind::entity:
        case NodeKind::literal:
        case NodeKind::relation:
            expect(f.children.empty(), "leaf with children");
            return;
        case NodeKind::reverse:
            expect(f.children.size() == 1 && f.children[0].is_relation_expr(),
                   "R wraps a relation expression");
            check_well_typed(f.children[0]);
            return;
        case NodeKind::join:
            expect(f.children.size() == 2 && f.children[0].is_relation_expr() &&
                       f.children[1].is_set_expr(),
                   "JOIN takes a relation and a set");
            break;
        case NodeKind::conj:
            expect(f.children.size() == 2 && f.children[0].is_set_expr() &&
                       f.children[1].is_set_expr(),
                   "AND takes two sets");
            break;
        case NodeKind::count:
            expect(f.children.size() == 1 && f.children[0].is_set_expr(), "COUNT takes a set");
            break;
        case NodeKind::argmax:
        case NodeKind::argmin:
            expect(f.children.size() == 2 && f.children[0].is_set_expr() &&
                       f.children[1].is_relation_expr(),
                   "ARGMAX/ARGMIN take a set and a relation");
            break;
        case NodeKind::compare:
            expect(f.children.size() == 2 && f.children[0].is_relation_expr() &&
                       f.children[1].kind == NodeKind::literal,
                   "comparison takes a relation and a literal");
            break;
    }
    for (const auto& c : f.children) check_well_typed(c);
}

/// Structure-only form: every entity, literal and relation rendered as [].
using Skeleton = std::string;

namespace detail {
inline void skeleton_into(const SExpr& f, std::string& out) {
    if (f.is_leaf()) {
        out += "[]";
        return;
    }
    switch (f.kind) {
        case NodeKind::reverse:
            out += "(R ";
            skeleton_into(f.children[0], out);
            out.push_back(')');
            return;
        case NodeKind::join:
        case NodeKind::conj:
        case NodeKind::argmax:
        case NodeKind::argmin:
        case NodeKind::count: {
            out.push_back('(');
            out += f.kind == NodeKind::join     ? "JOIN"
                   : f.kind == NodeKind::conj   ? "AND"
                   : f.kind == NodeKind::argmax ? "ARGMAX"
                   : f.kind == NodeKind::argmin ? "ARGMIN"
                                                : "COUNT";
            for (const auto& c : f.children) {
                out.push_back(' ');
                skeleton_into(c, out);
            }
            out.push_back(')');
            return;
        }
        case NodeKind::compare:
            out.push_back('(');
            out += compare_op_token(f.op);
            out += " ";
            skeleton_into(f.children[0], out);
            out += " ";
            skeleton_into(f.children[1], out);
            out.push_back(')');
            return;
        default:
            return;
    }
}
}  // namespace detail

inline Skeleton skeleton(const SExpr& f) {
    std::string out;
    detail::skeleton_into(f, out);
    return out;
}

enum class SlotKind { entity, relation, literal };

/// Address of a leaf: the child-index path from the root.
struct SlotRef {
    std::vector<int> path;
    SlotKind kind = SlotKind::entity;

    bool operator==(const SlotRef&) const = default;
};

namespace detail {
inline void collect_slots(const SExpr& f, std::vector<int>& path, std::vector<SlotRef>& out) {
    if (f.is_leaf()) {
        SlotKind k = f.kind == NodeKind::entity     ? SlotKind::entity
                     : f.kind == NodeKind::relation ? SlotKind::relation
                                                    : SlotKind::literal;
        out.push_back({path, k});
        return;
    }
    for (size_t i = 0; i < f.children.size(); ++i) {
        path.push_back(static_cast<int>(i));
        collect_slots(f.children[i], path, out);
        path.pop_back();
    }
}
}  // namespace detail

/// All leaf slots in depth-first order.
inline std::vector<SlotRef> slots(const SExpr& f) {
    std::vector<SlotRef> out;
    std::vector<int> path;
    detail::collect_slots(f, path, out);
    return out;
}

inline const SExpr* resolve_slot(const SExpr& f, const SlotRef& slot) {
    const SExpr* node = &f;
    for (int i : slot.path) {
        if (i < 0 || static_cast<size_t>(i) >= node->children.size()) return nullptr;
        node = &node->children[static_cast<size_t>(i)];
    }
    return node->is_leaf() ? node : nullptr;
}

/// Replace exactly one leaf. The replacement's kind must match the slot's.
inline SExpr substitute(SExpr f, const SlotRef& slot, const SExpr& value) {
    SExpr* node = &f;
    for (int i : slot.path) {
        if (i < 0 || static_cast<size_t>(i) >= node->children.size())
            throw Error("invalid-slot-path", "path does not resolve");
        node = &node->children[static_cast<size_t>(i)];
    }
    if (!node->is_leaf()) throw Error("invalid-slot-path", "path resolves to an inner node");
    SlotKind have = node->kind == NodeKind::entity     ? SlotKind::entity
                    : node->kind == NodeKind::relation ? SlotKind::relation
                                                       : SlotKind::literal;
    if (have != slot.kind) throw Error("slot-kind-mismatch", "slot kind does not match leaf");
    bool value_ok = (slot.kind == SlotKind::entity && value.kind == NodeKind::entity) ||
                    (slot.kind == SlotKind::relation && value.kind == NodeKind::relation) ||
                    (slot.kind == SlotKind::literal && value.kind == NodeKind::literal);
    if (!value_ok) throw Error("slot-kind-mismatch", "replacement kind does not match slot");
    *node = value;
    return f;
}

/// Replace entity ids by their labels; ids without a label stay and are
/// counted in *unlabeled when given.
inline SExpr labelize(SExpr f, const std::unordered_map<std::string, std::string>& labels,
                      size_t* unlabeled = nullptr) {
    if (f.kind == NodeKind::entity) {
        auto it = labels.find(f.text);
        if (it != labels.end()) {
            f.text = it->second;
        } else if (unlabeled) {
            ++*unlabeled;
        }
        return f;
    }
    for (auto& c : f.children) c = labelize(std::move(c), labels, unlabeled);
    return f;
}

/// label -> candidate entity ids, most popular (highest triple degree)
/// first, id ascending on ties.
class LabelIndex {
public:
    LabelIndex() = default;

    static LabelIndex build(const KnowledgeGraph& kg) {
        LabelIndex idx;
        for (const auto& [id, label] : kg.labels())
            idx.by_label_[label].push_back({id, kg.degree(id)});
        for (auto& [_, ids] : idx.by_label_)
            std::sort(ids.begin(), ids.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
            });
        return idx;
    }

    const std::vector<std::pair<std::string, size_t>>* lookup(const std::string& label) const {
        auto it = by_label_.find(label);
        return it == by_label_.end() ? nullptr : &it->second;
    }

private:
    std::unordered_map<std::string, std::vector<std::pair<std::string, size_t>>> by_label_;
};

/// Rewrite labels back to entity ids: one output form per consistent
/// assignment, candidates per slot ordered by popularity. Plain literals
/// whose text matches a label are re-read as entities too, which covers
/// numeric labels like film titles. Output capped at max_forms.
inline std::vector<SExpr> delabelize(const SExpr& f, const LabelIndex& index,
                                     size_t max_forms = 64) {
    struct SlotChoice {
        SlotRef slot;
        std::vector<std::string> ids;
    };
    std::vector<SlotChoice> choices;
    for (const auto& s : slots(f)) {
        const SExpr* leaf = resolve_slot(f, s);
        if (s.kind == SlotKind::relation) continue;
        if (s.kind == SlotKind::literal && !leaf->datatype.empty()) continue;
        const auto* ids = index.lookup(leaf->text);
        if (!ids || ids->empty()) continue;
        SlotChoice c{s, {}};
        for (const auto& [id, _] : *ids) c.ids.push_back(id);
        choices.push_back(std::move(c));
    }
    std::vector<SExpr> out;
    if (choices.empty()) {
        out.push_back(f);
        return out;
    }
    // odometer over per-slot candidates, last slot fastest
    std::vector<size_t> pick(choices.size(), 0);
    while (out.size() < max_forms) {
        SExpr form = f;
        for (size_t i = 0; i < choices.size(); ++i) {
            SlotRef slot = choices[i].slot;
            // a literal slot becomes an entity slot once re-read as an id
            if (slot.kind == SlotKind::literal) {
                SExpr* node = &form;
                for (int step : slot.path) node = &node->children[static_cast<size_t>(step)];
                *node = SExpr::entity(choices[i].ids[pick[i]]);
            } else {
                form = substitute(std::move(form), slot, SExpr::entity(choices[i].ids[pick[i]]));
            }
        }
        out.push_back(std::move(form));
        size_t j = choices.size();
        while (j > 0) {
            --j;
            if (++pick[j] < choices[j].ids.size()) break;
            pick[j] = 0;
            if (j == 0) return out;
        }
    }
    return out;
}

}  // namespace kgqa
