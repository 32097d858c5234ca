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

#include "kgqa/kg.hpp"
#include "kgqa/sexpr.hpp"

namespace kgqa {

/// Direct denotational evaluation of a logical form over the store. This is
/// the reference route checked against to_sparql + execute_sparql; it walks
/// the AST with set algebra and never touches SPARQL text.
///
/// ARGMAX/ARGMIN semantics mirror the compiled ORDER BY ... LIMIT 1 exactly:
/// one winner, ties toward the lexicographically smallest member, members
/// without a numeric attribute value skipped. Comparisons likewise skip
/// non-numeric stored values; only a non-numeric literal written in the form
/// itself is an error.
inline AnswerSet interpret(const SExpr& f, const KnowledgeGraph& kg) {
    check_well_typed(f);

    struct Eval {
        const KnowledgeGraph& kg;

        // net direction of a relation expression: true when wrapped in an
        // odd number of R's, i.e. traversal from subject to object
        static std::pair<std::string, bool> flatten_rel(const SExpr& rel) {
            bool rev = false;
            const SExpr* node = &rel;
            while (node->kind == NodeKind::reverse) {
                rev = !rev;
                node = &node->children[0];
            }
            return {node->text, rev};
        }

        AnswerSet set(const SExpr& f) const {
            switch (f.kind) {
                case NodeKind::entity:
                    return {entity_value(f.text)};
                case NodeKind::literal:
                    return {literal_value(f.text)};
                case NodeKind::join: {
                    auto [r, rev] = flatten_rel(f.children[0]);
                    AnswerSet src = set(f.children[1]);
                    AnswerSet out;
                    for (const auto& v : src) {
                        if (rev) {
                            // (JOIN (R r) S): members are heads, collect tails
                            if (v.kind != ValueKind::entity) continue;
                            AnswerSet tails = kg.neighbors_out(v.text, r);
                            out.insert(tails.begin(), tails.end());
                        } else {
                            AnswerSet heads = kg.neighbors_in(v, r);
                            out.insert(heads.begin(), heads.end());
                        }
                    }
                    return out;
                }
                case NodeKind::conj: {
                    AnswerSet a = set(f.children[0]);
                    AnswerSet b = set(f.children[1]);
                    AnswerSet out;
                    for (const auto& v : a)
                        if (b.count(v)) out.insert(v);
                    return out;
                }
                case NodeKind::count:
                    return {literal_value(std::to_string(set(f.children[0]).size()))};
                case NodeKind::argmax:
                case NodeKind::argmin:
                    return arg_extreme(f, f.kind == NodeKind::argmax);
                case NodeKind::compare:
                    return compare(f);
                default:
                    throw Error("ill-typed", "relation expression in set position");
            }
        }

        AnswerSet arg_extreme(const SExpr& f, bool want_max) const {
            // (ARGMAX S r) ranks members by the value reached from the
            // member along r, so a plain relation reads member-as-subject;
            // (R r) flips it. Note this is the opposite role from JOIN.
            auto [r, rev] = flatten_rel(f.children[1]);
            AnswerSet members = set(f.children[0]);
            bool have = false;
            double best_val = 0;
            Value best;
            for (const auto& m : members) {
                AnswerSet vals;
                if (!rev) {
                    if (m.kind != ValueKind::entity) continue;
                    vals = kg.neighbors_out(m.text, r);
                } else {
                    vals = kg.neighbors_in(m, r);
                }
                for (const auto& v : vals) {
                    auto num = str::to_number(v.text);
                    if (!num) continue;
                    bool better = !have || (want_max ? *num > best_val : *num < best_val) ||
                                  (*num == best_val && m < best);
                    if (better) {
                        have = true;
                        best_val = *num;
                        best = m;
                    }
                }
            }
            if (!have) return {};
            return {best};
        }

        AnswerSet compare(const SExpr& f) const {
            const SExpr& lit = f.children[1];
            auto rhs = str::to_number(lit.text);
            if (!rhs) throw Error("non-numeric-literal", "comparison against '" + lit.text + "'");
            auto [r, rev] = flatten_rel(f.children[0]);
            AnswerSet out;
            for (const auto& t : kg.triples()) {
                if (t.relation != r) continue;
                // (lt r x) selects heads with an r-value below x; under (R r)
                // the roles flip and objects are selected by their head value
                const std::string& stored = rev ? t.subject : t.object.text;
                auto num = str::to_number(stored);
                if (!num) continue;
                bool ok = false;
                switch (f.op) {
                    case CompareOp::lt: ok = *num < *rhs; break;
                    case CompareOp::le: ok = *num <= *rhs; break;
                    case CompareOp::gt: ok = *num > *rhs; break;
                    case CompareOp::ge: ok = *num >= *rhs; break;
                }
                if (ok) out.insert(rev ? t.object : entity_value(t.subject));
            }
            return out;
        }
    };

    return Eval{kg}.set(f);
}

}  // namespace kgqa
