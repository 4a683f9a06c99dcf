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

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qswlab/graph.hpp"
#include "qswlab/operators.hpp"

namespace qswlab::testing {

/// H = 0, gamma_12 = gamma_21 = gamma, walker starts at node 1.
inline GraphSpec classical_hop(double gamma) {
    GraphBuilder b(2);
    b.rate(0, 1, gamma).rate(1, 0, gamma).initial(0, 1.0);
    return b.build();
}

/// g_12 = 1, gamma_13 = gamma_23 = 0.5, gamma_31 = 0.2, gamma_32 = 0.3; every lambda is 0.5.
inline GraphSpec three_node_admissible() {
    GraphBuilder b(3);
    b.couple(0, 1, 1.0).rate(0, 2, 0.5).rate(1, 2, 0.5).rate(2, 0, 0.2).rate(2, 1, 0.3).initial(0, 1.0);
    return b.build();
}

/// Random Hermitian couplings on a random edge set; with `admissible` every node
/// in a coherent component gets the same total outgoing rate.
inline GraphSpec random_graph(std::mt19937_64 &rng, std::size_t n, bool admissible, double edge_p = 0.5) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    GraphBuilder b(n);
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (u(rng) < edge_p) {
                b.couple(i, j, Complex(sym(rng), sym(rng)));
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        }
    }
    // Components of the coupling graph.
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] >= 0) {
            continue;
        }
        std::vector<std::size_t> stack{s};
        comp[s] = ncomp;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (auto w : adj[v]) {
                if (comp[w] < 0) {
                    comp[w] = ncomp;
                    stack.push_back(w);
                }
            }
        }
        ++ncomp;
    }
    std::vector<double> target(static_cast<std::size_t>(ncomp));
    for (auto &t : target) {
        t = 0.2 + u(rng);
    }
    for (std::size_t k = 0; k < n; ++k) {
        double lambda = admissible ? target[static_cast<std::size_t>(comp[k])] : 0.2 + u(rng);
        // Split lambda over two or three destinations, self-loop included.
        std::vector<std::size_t> dest;
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        while (dest.size() < std::min<std::size_t>(n, 2 + k % 2)) {
            auto d = pick(rng);
            if (std::find(dest.begin(), dest.end(), d) == dest.end()) {
                dest.push_back(d);
            }
        }
        std::vector<double> w(dest.size());
        double sum = 0.0;
        for (auto &x : w) {
            x = 0.1 + u(rng);
            sum += x;
        }
        for (std::size_t i = 0; i < dest.size(); ++i) {
            b.rate(k, dest[i], lambda * w[i] / sum);
        }
    }
    return b.build();
}

inline StateVector random_state(std::mt19937_64 &rng, std::size_t n) {
    std::normal_distribution<double> nd;
    StateVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        v(k) = Complex(nd(rng), nd(rng));
    }
    return v / v.norm();
}

inline ComplexMatrix random_psd(std::mt19937_64 &rng, std::size_t n) {
    std::normal_distribution<double> nd;
    ComplexMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            a(i, j) = Complex(nd(rng), nd(rng)) / std::sqrt(2.0 * static_cast<double>(n));
        }
    }
    return a * a.adjoint();
}

/// Directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string &tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    std::filesystem::path file(const std::string &name) const {
        return path_ / name;
    }
    std::string write(const std::string &name, const std::string &content) const {
        auto p = file(name);
        std::ofstream(p, std::ios::binary) << content;
        return p.string();
    }

  private:
    std::filesystem::path path_;
};

inline std::string read_text(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Drops "# wall_clock_seconds=" lines.
inline std::string strip_wall_clock(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        if (line.rfind("# wall_clock_seconds=", 0) != 0) {
            out += line + "\n";
        }
    }
    return out;
}

}  // namespace qswlab::testing
