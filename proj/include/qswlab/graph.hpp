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

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qswlab {

using Complex = std::complex<double>;
using NodeIndex = std::size_t;
using NodePair = std::pair<NodeIndex, NodeIndex>;

/// Largest graph accepted by the parser; every downstream operator is dense.
inline constexpr std::size_t kMaxNodes = 4096;

/// Relative tolerance of the admissibility test |g_nm| |lambda_n - lambda_m| <= tol * scale.
inline constexpr double kAdmissibilityTolerance = 1e-10;

/// Immutable description of a stochastic walk: nodes, Hermitian coherent couplings,
/// nonnegative incoherent rates and an optional initial state. Node indices are
/// zero-based positions in `labels()`.
class GraphSpec {
  public:
    std::size_t node_count() const {
        return labels_.size();
    }
    const std::vector<std::string> &labels() const {
        return labels_;
    }
    const std::string &label(NodeIndex k) const {
        return labels_.at(k);
    }
    std::optional<NodeIndex> find(std::string_view label) const;

    /// Both (i,j) and (j,i) are stored, with g_ji = conj(g_ij). Diagonal entries are real.
    const std::map<NodePair, Complex> &coherent() const {
        return coherent_;
    }
    /// (from, to) -> gamma. Self-loops are dephasing channels.
    const std::map<NodePair, double> &incoherent() const {
        return incoherent_;
    }
    const std::optional<std::vector<std::pair<NodeIndex, Complex>>> &initial_state() const {
        return initial_;
    }

    Complex coupling(NodeIndex i, NodeIndex j) const;
    double rate(NodeIndex from, NodeIndex to) const;

  private:
    friend class GraphBuilder;

    std::vector<std::string> labels_;
    std::map<std::string, NodeIndex, std::less<>> index_;
    std::map<NodePair, Complex> coherent_;
    std::map<NodePair, double> incoherent_;
    std::optional<std::vector<std::pair<NodeIndex, Complex>>> initial_;
};

/// Incremental construction of a GraphSpec. Every mutator checks the invariant it
/// could break and throws InputError.
class GraphBuilder {
  public:
    GraphBuilder() = default;
    /// Creates nodes labelled "1" .. "n".
    explicit GraphBuilder(std::size_t n);

    NodeIndex add_node(std::string label);
    std::optional<NodeIndex> find(std::string_view label) const;

    /// Sets g_ij and, implicitly, g_ji = conj(g_ij). Repeating a pair is allowed only
    /// when the values agree within 1e-12.
    GraphBuilder &couple(NodeIndex i, NodeIndex j, Complex g);
    GraphBuilder &rate(NodeIndex from, NodeIndex to, double gamma);
    GraphBuilder &initial(NodeIndex node, Complex amplitude);

    GraphSpec build() const;

  private:
    void check_node(NodeIndex k) const;

    GraphSpec graph_;
    bool has_initial_ = false;
};

/// Parses the JSON graph document. Throws ParseError.
GraphSpec parse_graph(std::string_view text);

/// Serializes to the same document format parse_graph accepts (one-sided coherent entries).
std::string to_json_text(const GraphSpec &g);

/// Total outgoing incoherent rate of node k, self-loop included.
double node_lambda(const GraphSpec &g, NodeIndex k);
std::vector<double> node_lambdas(const GraphSpec &g);

/// Connected components of the nonzero-coupling graph, each sorted, ordered by first node.
std::vector<std::vector<NodeIndex>> coherent_subgraphs(const GraphSpec &g);

/// Scale entering the admissibility tolerance: max(1, max lambda) * max(1, max |g|).
double admissibility_scale(const GraphSpec &g);

struct Violation {
    NodeIndex n;
    NodeIndex m;
    Complex coupling;
    double lambda_n;
    double lambda_m;
};

struct ValidationReport {
    bool admissible = true;
    std::vector<Violation> violations;
    std::vector<std::vector<NodeIndex>> subgraphs;
    /// Per subgraph; empty when the lambdas inside that subgraph disagree.
    std::vector<std::optional<double>> subgraph_lambdas;
    /// Component index of each node.
    std::vector<std::size_t> component_of;
    /// max over coherent edges of |lambda_n - lambda_m| / max(lambda_n, lambda_m, eps).
    double trotter_mismatch = 0.0;
};

ValidationReport validate(const GraphSpec &g);

}  // namespace qswlab
