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
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgqa/common.hpp"
#include "kgqa/prng.hpp"

namespace kgqa {

struct Triple {
    std::string subject;   // entity id
    std::string relation;  // dotted namespace id, e.g. "people.person.place_of_birth"
    Value object;          // entity id or literal value

    auto operator<=>(const Triple&) const = default;
};

struct TripleSample {
    Triple triple;
    std::string subject_label;  // falls back to the raw id
    std::string object_label;   // literal objects label as their own text
};

struct KgStats {
    size_t triples = 0;
    size_t entities = 0;
    size_t relations = 0;
    size_t labels = 0;
};

/// Immutable in-memory triple store. All indices are built once at
/// construction; afterwards the store is read-only and safe for any number
/// of concurrent readers.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    static KnowledgeGraph from_triples(std::vector<Triple> triples,
                                       std::unordered_map<std::string, std::string> labels) {
        KnowledgeGraph kg;
        kg.labels_ = std::move(labels);
        kg.triples_.reserve(triples.size());
        for (auto& t : triples) kg.add(std::move(t));
        return kg;
    }

    /// Triple file: `subject<TAB>relation<TAB>object<TAB>kind` with kind in
    /// {e,l}; `#`-prefixed lines are comments. Label file: `id<TAB>label`.
    static KnowledgeGraph load(const std::string& triples_path, const std::string& labels_path) {
        KnowledgeGraph kg;
        kg.load_labels(labels_path);
        std::ifstream in(triples_path);
        if (!in) throw Error("file-not-found", triples_path);
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            auto fields = str::split(line, '\t');
            if (fields.size() != 4 || fields[0].empty() || fields[1].empty() ||
                (fields[3] != "e" && fields[3] != "l")) {
                throw Error("malformed-triple-line",
                            triples_path + ":" + std::to_string(lineno) + ": " + line);
            }
            ValueKind kind = fields[3] == "e" ? ValueKind::entity : ValueKind::literal;
            kg.add(Triple{std::move(fields[0]), std::move(fields[1]),
                          Value{std::move(fields[2]), kind}});
        }
        return kg;
    }

    const std::vector<Triple>& triples() const { return triples_; }
    const std::unordered_map<std::string, std::string>& labels() const { return labels_; }

    std::string label_or_id(const std::string& id) const {
        auto it = labels_.find(id);
        return it == labels_.end() ? id : it->second;
    }

    /// { o | (s, r, o) in KG }. Unknown ids yield the empty set.
    AnswerSet neighbors_out(const std::string& s, const std::string& r) const {
        auto it = idx_spo_.find(spo_key(s, r));
        return it == idx_spo_.end() ? AnswerSet{} : it->second;
    }

    /// { s | (s, r, o) in KG } as entity values.
    AnswerSet neighbors_in(const Value& o, const std::string& r) const {
        auto it = idx_ops_.find(ops_key(o, r));
        if (it == idx_ops_.end()) return {};
        AnswerSet out;
        for (const auto& s : it->second) out.insert(entity_value(s));
        return out;
    }

    AnswerSet neighbors_in(const std::string& entity_id, const std::string& r) const {
        return neighbors_in(entity_value(entity_id), r);
    }

    size_t relation_count(const std::string& r) const {
        auto it = idx_rel_.find(r);
        return it == idx_rel_.end() ? 0 : it->second.size();
    }

    /// Keeps exactly the relations with at least one triple, preserving
    /// the input order.
    std::vector<std::string> relations_with_triples(const std::vector<std::string>& relations) const {
        std::vector<std::string> out;
        for (const auto& r : relations)
            if (relation_count(r) > 0) out.push_back(r);
        return out;
    }

    std::vector<std::string> all_relations() const {
        std::vector<std::string> out;
        out.reserve(idx_rel_.size());
        for (const auto& [r, _] : idx_rel_) out.push_back(r);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Up to k distinct head entities of relation r, as (id, label) pairs.
    /// A pure function of (KG, r, k, seed): candidates are sorted before the
    /// seeded partial shuffle so map iteration order never leaks in.
    std::vector<std::pair<std::string, std::string>> sample_subjects(const std::string& r,
                                                                     size_t k,
                                                                     uint64_t seed) const {
        if (k < 1) throw Error("bad-argument", "sample_subjects: k must be >= 1");
        auto it = idx_rel_.find(r);
        if (it == idx_rel_.end()) return {};
        std::set<std::string> distinct;
        for (size_t idx : it->second) distinct.insert(triples_[idx].subject);
        std::vector<std::string> heads(distinct.begin(), distinct.end());
        Prng rng = Prng::substream(seed, "subjects:" + r);
        auto chosen = rng.sample(std::move(heads), k);
        std::vector<std::pair<std::string, std::string>> out;
        out.reserve(chosen.size());
        for (auto& id : chosen) {
            std::string label = label_or_id(id);
            out.emplace_back(std::move(id), std::move(label));
        }
        return out;
    }

    /// One seeded triple of relation r with subject/object labels resolved.
    TripleSample sample_triple(const std::string& r, uint64_t seed) const {
        auto it = idx_rel_.find(r);
        if (it == idx_rel_.end() || it->second.empty())
            throw Error("no-triple-for-relation", r);
        Prng rng = Prng::substream(seed, "triple:" + r);
        const Triple& t = triples_[it->second[rng.bounded(it->second.size())]];
        TripleSample s{t, label_or_id(t.subject), t.object.text};
        if (t.object.kind == ValueKind::entity) s.object_label = label_or_id(t.object.text);
        return s;
    }

    // Adjacency by node, for reverse path exploration. Triple indices in
    // load order.
    const std::vector<size_t>& outgoing(const std::string& s) const {
        static const std::vector<size_t> empty;
        auto it = adj_out_.find(s);
        return it == adj_out_.end() ? empty : it->second;
    }

    const std::vector<size_t>& incoming(const Value& o) const {
        static const std::vector<size_t> empty;
        auto it = adj_in_.find(value_key(o));
        return it == adj_in_.end() ? empty : it->second;
    }

    /// Triple degree (in + out), the popularity measure for ranking
    /// ambiguous label resolutions.
    size_t degree(const std::string& id) const {
        size_t d = outgoing(id).size();
        auto it = adj_in_.find(value_key(entity_value(id)));
        if (it != adj_in_.end()) d += it->second.size();
        return d;
    }

    KgStats stats() const {
        KgStats s;
        s.triples = triples_.size();
        s.relations = idx_rel_.size();
        s.labels = labels_.size();
        std::set<std::string> ents;
        for (const auto& t : triples_) {
            ents.insert(t.subject);
            if (t.object.kind == ValueKind::entity) ents.insert(t.object.text);
        }
        s.entities = ents.size();
        return s;
    }

private:
    void add(Triple t) {
        // Field text is index-key material; separator bytes are not allowed.
        for (const std::string* f : {&t.subject, &t.relation, &t.object.text})
            if (f->find('\t') != std::string::npos || f->find('\n') != std::string::npos)
                throw Error("malformed-triple-line", "field contains tab or newline: " + *f);
        size_t idx = triples_.size();
        idx_spo_[spo_key(t.subject, t.relation)].insert(t.object);
        idx_ops_[ops_key(t.object, t.relation)].insert(t.subject);
        idx_rel_[t.relation].push_back(idx);
        adj_out_[t.subject].push_back(idx);
        adj_in_[value_key(t.object)].push_back(idx);
        triples_.push_back(std::move(t));
    }

    void load_labels(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("file-not-found", path);
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            auto fields = str::split(line, '\t');
            if (fields.size() != 2 || fields[0].empty())
                throw Error("malformed-label-line", path + ":" + std::to_string(lineno));
            auto [it, inserted] = labels_.emplace(fields[0], fields[1]);
            if (!inserted && it->second != fields[1])
                throw Error("duplicate-label", path + ":" + std::to_string(lineno) + ": " +
                                                   fields[0] + " mapped to both \"" + it->second +
                                                   "\" and \"" + fields[1] + "\"");
        }
    }

    // Tab-composed map keys; 'add' guarantees fields are tab-free.
    static std::string spo_key(const std::string& s, const std::string& r) { return s + '\t' + r; }
    static std::string value_key(const Value& v) {
        return v.text + '\t' + (v.kind == ValueKind::entity ? 'e' : 'l');
    }
    static std::string ops_key(const Value& o, const std::string& r) {
        return value_key(o) + '\t' + r;
    }

    std::vector<Triple> triples_;
    std::unordered_map<std::string, AnswerSet> idx_spo_;
    std::unordered_map<std::string, std::set<std::string>> idx_ops_;
    std::unordered_map<std::string, std::vector<size_t>> idx_rel_;
    std::unordered_map<std::string, std::vector<size_t>> adj_out_;
    std::unordered_map<std::string, std::vector<size_t>> adj_in_;
    std::unordered_map<std::string, std::string> labels_;
};

}  // namespace kgqa
