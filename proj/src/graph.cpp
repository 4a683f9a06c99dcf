// Copyright 2026 The qswlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qswlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <nlohmann/json.hpp>

#include "qswlab/error.hpp"

namespace qswlab {

namespace {

constexpr double kEntryTolerance = 1e-12;

using json = nlohmann::json;

void reject_unknown_keys(const json &obj, std::initializer_list<std::string_view> allowed, const std::string &where) {
    for (const auto &item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw ParseError("unknown key \"" + item.key() + "\" in " + where);
        }
    }
}

const json &require(const json &obj, const char *key, const std::string &where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(std::string("missing key \"") + key + "\" in " + where);
    }
    return *it;
}

double number(const json &obj, const char *key, const std::string &where, std::optional<double> fallback = {}) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) {
            return *fallback;
        }
        throw ParseError(std::string("missing key \"") + key + "\" in " + where);
    }
    if (!it->is_number()) {
        throw ParseError(std::string("\"") + key + "\" must be a number in " + where);
    }
    return it->get<double>();
}

NodeIndex node_ref(const GraphBuilder &b, const json &obj, const char *key, const std::string &where) {
    const json &v = require(obj, key, where);
    if (!v.is_string()) {
        throw ParseError(std::string("\"") + key + "\" must be a node label in " + where);
    }
    auto idx = b.find(v.get<std::string>());
    if (!idx) {
        throw ParseError("unknown node \"" + v.get<std::string>() + "\" in " + where);
    }
    return *idx;
}

const json &array_field(const json &doc, const char *key) {
    const json &v = doc.at(key);
    if (!v.is_array()) {
        throw ParseError(std::string("\"") + key + "\" must be an array");
    }
    return v;
}

}  // namespace

std::optional<NodeIndex> GraphSpec::find(std::string_view label) const {
    auto it = index_.find(label);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Complex GraphSpec::coupling(NodeIndex i, NodeIndex j) const {
    auto it = coherent_.find({i, j});
    return it == coherent_.end() ? Complex{} : it->second;
}

double GraphSpec::rate(NodeIndex from, NodeIndex to) const {
    auto it = incoherent_.find({from, to});
    return it == incoherent_.end() ? 0.0 : it->second;
}

GraphBuilder::GraphBuilder(std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        add_node(std::to_string(k + 1));
    }
}

NodeIndex GraphBuilder::add_node(std::string label) {
    if (graph_.index_.count(label) != 0) {
        throw InputError("duplicate node label \"" + label + "\"");
    }
    if (graph_.labels_.size() >= kMaxNodes) {
        throw InputError("graph exceeds the maximum of " + std::to_string(kMaxNodes) + " nodes");
    }
    NodeIndex k = graph_.labels_.size();
    graph_.index_.emplace(label, k);
    graph_.labels_.push_back(std::move(label));
    return k;
}

std::optional<NodeIndex> GraphBuilder::find(std::string_view label) const {
    return graph_.find(label);
}

void GraphBuilder::check_node(NodeIndex k) const {
    if (k >= graph_.labels_.size()) {
        throw InputError("node index " + std::to_string(k) + " out of range");
    }
}

GraphBuilder &GraphBuilder::couple(NodeIndex i, NodeIndex j, Complex g) {
    check_node(i);
    check_node(j);
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) {
        throw InputError("coupling must be finite");
    }
    if (i == j) {
        if (std::abs(g.imag()) > kEntryTolerance) {
            throw InputError("on-site energy of node \"" + graph_.labels_[i] + "\" must be real");
        }
        g = Complex(g.real(), 0.0);
    }
    auto it = graph_.coherent_.find({i, j});
    if (it != graph_.coherent_.end()) {
        if (std::abs(it->second - g) > kEntryTolerance) {
            throw InputError("non-Hermitian coupling between \"" + graph_.labels_[i] + "\" and \"" +
                             graph_.labels_[j] + "\"");
        }
        return *this;
    }
    graph_.coherent_[{i, j}] = g;
    graph_.coherent_[{j, i}] = std::conj(g);
    return *this;
}

GraphBuilder &GraphBuilder::rate(NodeIndex from, NodeIndex to, double gamma) {
    check_node(from);
    check_node(to);
    if (!std::isfinite(gamma)) {
        throw InputError("rate must be finite");
    }
    if (gamma < 0.0) {
        throw InputError("negative rate " + std::to_string(gamma) + " from \"" + graph_.labels_[from] +
                         "\" to \"" + graph_.labels_[to] + "\"");
    }
    if (!graph_.incoherent_.emplace(NodePair{from, to}, gamma).second) {
        throw InputError("duplicate incoherent edge from \"" + graph_.labels_[from] + "\" to \"" +
                         graph_.labels_[to] + "\"");
    }
    return *this;
}

GraphBuilder &GraphBuilder::initial(NodeIndex node, Complex amplitude) {
    check_node(node);
    if (!graph_.initial_) {
        graph_.initial_.emplace();
    }
    for (const auto &[k, a] : *graph_.initial_) {
        if (k == node) {
            throw InputError("duplicate initial amplitude for \"" + graph_.labels_[node] + "\"");
        }
    }
    graph_.initial_->emplace_back(node, amplitude);
    return *this;
}

GraphSpec GraphBuilder::build() const {
    if (graph_.labels_.empty()) {
        throw InputError("graph has no nodes");
    }
    if (graph_.initial_) {
        double norm2 = 0.0;
        for (const auto &[k, a] : *graph_.initial_) {
            norm2 += std::norm(a);
        }
        if (std::abs(norm2 - 1.0) > kEntryTolerance) {
            throw InputError("initial state is not normalized (squared norm " + std::to_string(norm2) + ")");
        }
    }
    return graph_;
}

GraphSpec parse_graph(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("malformed graph document: ") + e.what(), e.byte);
    }
    if (!doc.is_object()) {
        throw ParseError("graph document must be a JSON object");
    }
    reject_unknown_keys(doc, {"nodes", "coherent", "incoherent", "initial"}, "graph document");
    if (!doc.contains("nodes")) {
        throw ParseError("missing key \"nodes\"");
    }

    try {
        GraphBuilder b;
        for (const auto &node : array_field(doc, "nodes")) {
            if (!node.is_string()) {
                throw ParseError("node labels must be strings");
            }
            b.add_node(node.get<std::string>());
        }
        if (doc.contains("coherent")) {
            std::size_t idx = 0;
            for (const auto &e : array_field(doc, "coherent")) {
                std::string where = "coherent[" + std::to_string(idx++) + "]";
                if (!e.is_object()) {
                    throw ParseError(where + " must be an object");
                }
                reject_unknown_keys(e, {"i", "j", "re", "im"}, where);
                NodeIndex i = node_ref(b, e, "i", where);
                NodeIndex j = node_ref(b, e, "j", where);
                b.couple(i, j, Complex(number(e, "re", where), number(e, "im", where, 0.0)));
            }
        }
        if (doc.contains("incoherent")) {
            std::size_t idx = 0;
            for (const auto &e : array_field(doc, "incoherent")) {
                std::string where = "incoherent[" + std::to_string(idx++) + "]";
                if (!e.is_object()) {
                    throw ParseError(where + " must be an object");
                }
                reject_unknown_keys(e, {"from", "to", "rate"}, where);
                NodeIndex from = node_ref(b, e, "from", where);
                NodeIndex to = node_ref(b, e, "to", where);
                b.rate(from, to, number(e, "rate", where));
            }
        }
        if (doc.contains("initial")) {
            std::size_t idx = 0;
            for (const auto &e : array_field(doc, "initial")) {
                std::string where = "initial[" + std::to_string(idx++) + "]";
                if (!e.is_object()) {
                    throw ParseError(where + " must be an object");
                }
                reject_unknown_keys(e, {"node", "re", "im"}, where);
                NodeIndex k = node_ref(b, e, "node", where);
                b.initial(k, Complex(number(e, "re", where), number(e, "im", where, 0.0)));
            }
        }
        return b.build();
    } catch (const ParseError &) {
        throw;
    } catch (const InputError &e) {
        throw ParseError(e.what());
    }
}

std::string to_json_text(const GraphSpec &g) {
    json doc;
    doc["nodes"] = g.labels();
    json coherent = json::array();
    for (const auto &[ij, value] : g.coherent()) {
        if (ij.first <= ij.second) {
            coherent.push_back(
                {{"i", g.label(ij.first)}, {"j", g.label(ij.second)}, {"re", value.real()}, {"im", value.imag()}});
        }
    }
    doc["coherent"] = coherent;
    json incoherent = json::array();
    for (const auto &[nm, gamma] : g.incoherent()) {
        incoherent.push_back({{"from", g.label(nm.first)}, {"to", g.label(nm.second)}, {"rate", gamma}});
    }
    doc["incoherent"] = incoherent;
    if (g.initial_state()) {
        json initial = json::array();
        for (const auto &[k, a] : *g.initial_state()) {
            initial.push_back({{"node", g.label(k)}, {"re", a.real()}, {"im", a.imag()}});
        }
        doc["initial"] = initial;
    }
    return doc.dump(2);
}

double node_lambda(const GraphSpec &g, NodeIndex k) {
    if (k >= g.node_count()) {
        throw InputError("node index " + std::to_string(k) + " out of range");
    }
    double lambda = 0.0;
    for (auto it = g.incoherent().lower_bound({k, 0}); it != g.incoherent().end() && it->first.first == k; ++it) {
        lambda += it->second;
    }
    return lambda;
}

std::vector<double> node_lambdas(const GraphSpec &g) {
    std::vector<double> lambdas(g.node_count(), 0.0);
    for (const auto &[nm, gamma] : g.incoherent()) {
        lambdas[nm.first] += gamma;
    }
    return lambdas;
}

std::vector<std::vector<NodeIndex>> coherent_subgraphs(const GraphSpec &g) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<NodeIndex>> neighbours(n);
    for (const auto &[ij, value] : g.coherent()) {
        if (ij.first != ij.second && value != Complex{}) {
            neighbours[ij.first].push_back(ij.second);
        }
    }
    std::vector<bool> seen(n, false);
    std::vector<std::vector<NodeIndex>> components;
    for (NodeIndex start = 0; start < n; ++start) {
        if (seen[start]) {
            continue;
        }
        std::vector<NodeIndex> component;
        std::deque<NodeIndex> queue{start};
        seen[start] = true;
        while (!queue.empty()) {
            NodeIndex k = queue.front();
            queue.pop_front();
            component.push_back(k);
            for (NodeIndex next : neighbours[k]) {
                if (!seen[next]) {
                    seen[next] = true;
                    queue.push_back(next);
                }
            }
        }
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
    }
    return components;
}

double admissibility_scale(const GraphSpec &g) {
    double max_lambda = 0.0;
    for (double l : node_lambdas(g)) {
        max_lambda = std::max(max_lambda, l);
    }
    double max_g = 0.0;
    for (const auto &[ij, value] : g.coherent()) {
        max_g = std::max(max_g, std::abs(value));
    }
    return std::max(1.0, max_lambda) * std::max(1.0, max_g);
}

ValidationReport validate(const GraphSpec &g) {
    ValidationReport report;
    const auto lambdas = node_lambdas(g);
    const double bound = kAdmissibilityTolerance * admissibility_scale(g);

    for (const auto &[nm, value] : g.coherent()) {
        auto [n, m] = nm;
        if (n >= m || value == Complex{}) {
            continue;
        }
        double gap = std::abs(lambdas[n] - lambdas[m]);
        if (std::abs(value) * gap > bound) {
            report.violations.push_back({n, m, value, lambdas[n], lambdas[m]});
        }
        double denom = std::max({lambdas[n], lambdas[m], std::numeric_limits<double>::min()});
        report.trotter_mismatch = std::max(report.trotter_mismatch, gap / denom);
    }
    report.admissible = report.violations.empty();

    report.subgraphs = coherent_subgraphs(g);
    report.component_of.assign(g.node_count(), 0);
    for (std::size_t c = 0; c < report.subgraphs.size(); ++c) {
        for (NodeIndex k : report.subgraphs[c]) {
            report.component_of[k] = c;
        }
    }
    std::vector<bool> clean(report.subgraphs.size(), true);
    for (const auto &v : report.violations) {
        clean[report.component_of[v.n]] = false;
    }
    for (std::size_t c = 0; c < report.subgraphs.size(); ++c) {
        if (clean[c]) {
            report.subgraph_lambdas.emplace_back(lambdas[report.subgraphs[c].front()]);
        } else {
            report.subgraph_lambdas.emplace_back(std::nullopt);
        }
    }
    return report;
}

}  // namespace qswlab
