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

#include <string>
#include <vector>

#include "kgqa/common.hpp"
#include "kgqa/sexpr.hpp"

namespace kgqa {

struct SparqlQuery {
    std::string text;
    std::string projected;  // variable name without '?'
};

inline constexpr const char* kDefaultBaseIri = "http://kgqa.local/";

/// Compiles a logical form to a SELECT DISTINCT query over basic graph
/// patterns. Dialect, kept deliberately small and deterministic:
///   - one variable counter, ?x0 is always the projected variable, the rest
///     numbered in compile (depth-first) order;
///   - entity/relation IRIs are base_iri + id, emitted verbatim;
///   - AND unifies both children onto one variable; leaf operands become
///     VALUES bindings;
///   - comparisons emit FILTER with the bare numeric literal;
///   - ARGMAX/ARGMIN emit a subselect with ORDER BY <dir>(?value) ?member
///     LIMIT 1, non-numeric values excluded via isNumeric, so the single
///     returned member is deterministic under ties (smallest member wins);
///   - COUNT emits a COUNT(DISTINCT ...) subselect.
///
/// Golden examples live in the test suite; the in-memory engine in
/// sparql_engine.hpp evaluates exactly this dialect from the query text.
class SparqlCompiler {
public:
    explicit SparqlCompiler(std::string base_iri = kDefaultBaseIri)
        : base_(std::move(base_iri)) {}

    SparqlQuery compile(const SExpr& f) const {
        check_well_typed(f);
        Ctx ctx;
        std::string root = ctx.fresh();
        std::vector<std::string> lines;
        emit_set(f, root, lines, ctx);
        std::string text = "SELECT DISTINCT " + root + " WHERE { " + join_lines(lines) + " }";
        return {std::move(text), root.substr(1)};
    }

private:
    struct Ctx {
        int counter = 0;
        std::string fresh() { return "?x" + std::to_string(counter++); }
    };

    static std::string join_lines(const std::vector<std::string>& lines) {
        std::string out;
        for (const auto& l : lines) {
            if (!out.empty()) out.push_back(' ');
            out += l;
        }
        return out;
    }

    std::string iri(const std::string& id) const { return "<" + base_ + id + ">"; }

    static std::string quoted(const std::string& v) {
        std::string out = "\"";
        for (char c : v) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        out.push_back('"');
        return out;
    }

    std::string leaf_term(const SExpr& f) const {
        if (f.kind == NodeKind::entity) return iri(f.text);
        // datatype suffixes are dropped: toy stores match literals by text
        if (f.datatype.empty() && str::is_numeric(f.text)) return f.text;
        return quoted(f.text);
    }

    static std::pair<std::string, bool> flatten_rel(const SExpr& rel) {
        bool rev = false;
        const SExpr* node = &rel;
        while (node->kind == NodeKind::reverse) {
            rev = !rev;
            node = &node->children[0];
        }
        return {node->text, rev};
    }

    // Emits patterns binding `target` to the denotation of f.
    void emit_set(const SExpr& f, const std::string& target, std::vector<std::string>& lines,
                  Ctx& ctx) const {
        switch (f.kind) {
            case NodeKind::entity:
            case NodeKind::literal:
                lines.push_back("VALUES " + target + " { " + leaf_term(f) + " }");
                return;
            case NodeKind::join: {
                auto [r, rev] = flatten_rel(f.children[0]);
                const SExpr& src = f.children[1];
                std::string src_term;
                if (src.is_leaf()) {
                    src_term = leaf_term(src);
                } else {
                    src_term = ctx.fresh();
                    emit_set(src, src_term, lines, ctx);
                }
                // (JOIN (R r) S) walks source->object, (JOIN r S) retrieves heads
                if (rev)
                    lines.push_back(src_term + " " + iri(r) + " " + target + " .");
                else
                    lines.push_back(target + " " + iri(r) + " " + src_term + " .");
                return;
            }
            case NodeKind::conj:
                emit_set(f.children[0], target, lines, ctx);
                emit_set(f.children[1], target, lines, ctx);
                return;
            case NodeKind::count: {
                std::string inner = ctx.fresh();
                std::vector<std::string> sub;
                emit_set(f.children[0], inner, sub, ctx);
                lines.push_back("{ SELECT (COUNT(DISTINCT " + inner + ") AS " + target +
                                ") WHERE { " + join_lines(sub) + " } }");
                return;
            }
            case NodeKind::argmax:
            case NodeKind::argmin: {
                auto [r, rev] = flatten_rel(f.children[1]);
                std::string value = ctx.fresh();
                std::vector<std::string> sub;
                emit_set(f.children[0], target, sub, ctx);
                if (rev)
                    sub.push_back(value + " " + iri(r) + " " + target + " .");
                else
                    sub.push_back(target + " " + iri(r) + " " + value + " .");
                sub.push_back("FILTER (isNumeric(" + value + "))");
                const char* dir = f.kind == NodeKind::argmax ? "DESC" : "ASC";
                lines.push_back("{ SELECT " + target + " WHERE { " + join_lines(sub) +
                                " } ORDER BY " + dir + "(" + value + ") " + target + " LIMIT 1 }");
                return;
            }
            case NodeKind::compare: {
                const SExpr& lit = f.children[1];
                if (!str::is_numeric(lit.text))
                    throw Error("non-numeric-literal", "comparison against '" + lit.text + "'");
                auto [r, rev] = flatten_rel(f.children[0]);
                std::string value = ctx.fresh();
                if (rev)
                    lines.push_back(value + " " + iri(r) + " " + target + " .");
                else
                    lines.push_back(target + " " + iri(r) + " " + value + " .");
                const char* op = f.op == CompareOp::lt   ? "<"
                                 : f.op == CompareOp::le ? "<="
                                 : f.op == CompareOp::gt ? ">"
                                                         : ">=";
                lines.push_back("FILTER (" + value + " " + op + " " + lit.text + ")");
                return;
            }
            default:
                throw Error("untranslatable", "relation expression in set position");
        }
    }

    std::string base_;
};

inline SparqlQuery to_sparql(const SExpr& f, const std::string& base_iri = kDefaultBaseIri) {
    return SparqlCompiler(base_iri).compile(f);
}

}  // namespace kgqa
