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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qswlab/cli.hpp"
#include "qswlab/format.hpp"
#include "qswlab/io.hpp"
#include "support.hpp"

namespace qswlab {
namespace {

using json = nlohmann::json;
using testing::TempDir;

const char *kHop = R"({"nodes": ["1", "2"],
  "incoherent": [{"from": "1", "to": "2", "rate": 1}, {"from": "2", "to": "1", "rate": 1}],
  "initial": [{"node": "1", "re": 1}]})";

const char *kAdmissible = R"({"nodes": ["1", "2", "3"],
  "coherent": [{"i": "1", "j": "2", "re": 1}],
  "incoherent": [{"from": "1", "to": "3", "rate": 0.5}, {"from": "2", "to": "3", "rate": 0.5},
                 {"from": "3", "to": "1", "rate": 0.2}, {"from": "3", "to": "2", "rate": 0.3}],
  "initial": [{"node": "1", "re": 1}]})";

const char *kMismatched = R"({"nodes": ["a", "b"],
  "coherent": [{"i": "a", "j": "b", "re": 1}],
  "incoherent": [{"from": "a", "to": "b", "rate": 0.5}, {"from": "b", "to": "a", "rate": 0.3}],
  "initial": [{"node": "a", "re": 1}]})";

const char *kUnitary = R"({"nodes": ["1", "2", "3"],
  "coherent": [{"i": "1", "j": "2", "re": 1}, {"i": "2", "j": "3", "re": 0.5}],
  "initial": [{"node": "1", "re": 1}]})";

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> csv_rows(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        rows.push_back(row);
    }
    return rows;
}

TEST(CliValidate, ExitCodes) {
    TempDir dir("qswlab-cli");
    auto ok = cli({"validate", dir.write("a.json", kAdmissible)});
    EXPECT_EQ(ok.code, 0);
    EXPECT_TRUE(json::parse(ok.out)["admissible"].get<bool>());

    auto bad = cli({"validate", dir.write("b.json", kMismatched)});
    EXPECT_EQ(bad.code, 2);
    const auto report = json::parse(bad.out);
    EXPECT_FALSE(report["admissible"].get<bool>());
    EXPECT_EQ(report["violations"].size(), 1u);
    EXPECT_NEAR(report["trotter_mismatch"].get<double>(), 0.4, 1e-15);

    auto broken = cli({"validate", dir.write("c.json", "{\"nodes\": [")});
    EXPECT_EQ(broken.code, 1);
    EXPECT_NE(broken.err.find("at byte"), std::string::npos);

    EXPECT_EQ(cli({"validate", dir.file("missing.json").string()}).code, 1);
    EXPECT_EQ(cli({"frobnicate"}).code, 1);
    EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(CliRun, MasterMatchesRateEquation) {
    TempDir dir("qswlab-cli");
    const auto out = dir.file("hop.csv").string();
    auto r = cli({"run", dir.write("hop.json", kHop), "--engine", "master", "--t-final", "2", "--samples", "5",
                  "--dt", "1e-3", "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto text = testing::read_text(out);
    EXPECT_NE(text.find("# engine=master"), std::string::npos);
    EXPECT_NE(text.find("# graph_hash=" + content_hash(kHop)), std::string::npos);
    EXPECT_NE(text.find("t,p_1,p_2\n"), std::string::npos);
    const auto rows = csv_rows(text);
    ASSERT_EQ(rows.size(), 5u);
    for (const auto &row : rows) {
        EXPECT_NEAR(row[1], 0.5 + 0.5 * std::exp(-2.0 * row[0]), 1e-10);
    }
}

TEST(CliRun, QtqcOnInadmissibleGraphWritesNothing) {
    TempDir dir("qswlab-cli");
    const auto out = dir.file("never.csv");
    auto r = cli({"run", dir.write("m.json", kMismatched), "--engine", "qtqc", "--out", out.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(std::filesystem::exists(out));
}

TEST(CliRun, TrotterModeIsOptIn) {
    TempDir dir("qswlab-cli");
    const auto graph = dir.write("m.json", kMismatched);
    EXPECT_EQ(cli({"run", graph, "--engine", "qtqc", "--trotter-threshold", "0.3", "--num-traj", "10"}).code, 2);
    auto r = cli({"run", graph, "--engine", "qtqc", "--trotter-threshold", "0.5", "--num-traj", "10"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("# mode=trotter"), std::string::npos);
    EXPECT_NE(r.out.find("# trotter_mismatch=0.4"), std::string::npos);
}

TEST(CliRun, TrajectoriesReproducible) {
    TempDir dir("qswlab-cli");
    const auto graph = dir.write("a.json", kAdmissible);
    auto a = cli({"run", graph, "--engine", "trajectories", "--num-traj", "1", "--seed", "99", "--t-final", "3"});
    auto b = cli({"run", graph, "--engine", "trajectories", "--num-traj", "1", "--seed", "99", "--t-final", "3"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(testing::strip_wall_clock(a.out), testing::strip_wall_clock(b.out));
    EXPECT_NE(a.out.find("se_3"), std::string::npos);
}

TEST(CliRun, SeedFromEnvironment) {
    TempDir dir("qswlab-cli");
    const auto graph = dir.write("a.json", kAdmissible);
    ::setenv("QSWLAB_SEED", "4242", 1);
    auto env = cli({"run", graph, "--engine", "qtqc", "--num-traj", "50"});
    ::unsetenv("QSWLAB_SEED");
    auto flag = cli({"run", graph, "--engine", "qtqc", "--num-traj", "50", "--seed", "4242"});
    ASSERT_EQ(env.code, 0);
    EXPECT_NE(env.out.find("# seed=4242"), std::string::npos);
    EXPECT_EQ(testing::strip_wall_clock(env.out), testing::strip_wall_clock(flag.out));

    ::setenv("QSWLAB_SEED", "not-a-number", 1);
    EXPECT_EQ(cli({"run", graph, "--engine", "qtqc", "--num-traj", "5"}).code, 1);
    ::unsetenv("QSWLAB_SEED");
}

TEST(CliRun, StartNodeAndMissingInitialState) {
    TempDir dir("qswlab-cli");
    const auto graph = dir.write("u.json", R"({"nodes": ["x", "y"], "coherent": [{"i": "x", "j": "y", "re": 1}]})");
    EXPECT_EQ(cli({"run", graph}).code, 1);
    EXPECT_EQ(cli({"run", graph, "--start-node", "zz"}).code, 1);
    auto r = cli({"run", graph, "--start-node", "y", "--samples", "1", "--t-final", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0][1], 0.0);
    EXPECT_EQ(rows[0][2], 1.0);
}

TEST(CliRun, LogsAndMatrixDump) {
    TempDir dir("qswlab-cli");
    const auto graph = dir.write("a.json", kAdmissible);
    const auto log = dir.file("jumps.jsonl");
    const auto dump = dir.file("ops.txt");
    auto r = cli({"run", graph, "--engine", "trajectories", "--num-traj", "3", "--t-final", "10",
                  "--log-trajectories", log.string(), "--dump-matrices", dump.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(testing::read_text(log));
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        const auto j = json::parse(line);
        EXPECT_EQ(j["idx"].get<int>(), count);
        for (const auto &jump : j["jumps"]) {
            EXPECT_EQ(jump.size(), 3u);
            EXPECT_TRUE(jump[1].is_string());
        }
        ++count;
    }
    EXPECT_EQ(count, 3);
    const auto ops = testing::read_text(dump);
    EXPECT_EQ(ops.rfind("# H\n0,0,1,0,0,0\n", 0), 0u);
    EXPECT_NE(ops.find("# K\n0.25,0,0,0,0,0\n"), std::string::npos);

    EXPECT_EQ(cli({"run", graph, "--log-trajectories", log.string()}).code, 1);
}

TEST(CliCompare, AllEnginesPass) {
    TempDir dir("qswlab-cli");
    auto r = cli({"compare", dir.write("a.json", kAdmissible), "--t-final", "3", "--samples", "7", "--num-traj",
                  "20000", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_TRUE(doc["pass"].get<bool>());
    EXPECT_TRUE(doc["engines"]["trajectories"]["pass"].get<bool>());
    EXPECT_TRUE(doc["engines"]["qtqc"]["pass"].get<bool>());
    EXPECT_NEAR(doc["tolerance"].get<double>(), 4.0 / std::sqrt(20000.0), 1e-15);
}

TEST(CliCompare, UndersampledFails) {
    TempDir dir("qswlab-cli");
    auto r = cli({"compare", dir.write("a.json", kAdmissible), "--num-traj", "10"});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(json::parse(r.out)["undersampled"].get<bool>());
    EXPECT_NE(r.err.find("note:"), std::string::npos);
}

TEST(CliCompare, UnitaryLimitIsExact) {
    TempDir dir("qswlab-cli");
    auto r = cli({"compare", dir.write("u.json", kUnitary), "--t-final", "3", "--num-traj", "64"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_LT(doc["engines"]["trajectories"]["max_deviation"].get<double>(), 1e-8);
    EXPECT_LT(doc["engines"]["qtqc"]["max_deviation"].get<double>(), 1e-8);
}

TEST(CliCompare, InadmissibleSkipsQtqc) {
    TempDir dir("qswlab-cli");
    auto r = cli({"compare", dir.write("m.json", kMismatched), "--num-traj", "20000", "--t-final", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_TRUE(doc["engines"]["qtqc"].contains("skipped"));
}

TEST(CliResources, Outputs) {
    TempDir dir("qswlab-cli");
    auto r = cli({"resources", dir.write("hop.json", kHop), "--t-final", "100"});
    ASSERT_EQ(r.code, 0);
    const auto doc = json::parse(r.out);
    EXPECT_NEAR(doc["worst_case_measurements"].get<double>(), 144.27, 0.01);
    EXPECT_NEAR(doc["subgraphs"][0]["t_avg"].get<double>(), 0.693147, 1e-6);

    auto frozen = cli({"resources", dir.write("u.json", kUnitary)});
    ASSERT_EQ(frozen.code, 0);
    EXPECT_TRUE(json::parse(frozen.out)["subgraphs"][0]["t_avg"].is_null());

    EXPECT_EQ(cli({"resources", dir.write("m.json", kMismatched)}).code, 2);
}

TEST(CliAncilla, WorkedCase) {
    TempDir dir("qswlab-cli");
    // K = diag(0, 1) needs lambda = (0, 2); equal superposition start.
    const auto graph = dir.write("k.json", R"({"nodes": ["1", "2"],
        "incoherent": [{"from": "2", "to": "1", "rate": 2}],
        "initial": [{"node": "1", "re": 0.7071067811865476}, {"node": "2", "re": 0.7071067811865476}]})");
    auto r = cli({"ancilla", graph, "--time", format_number(std::log(2.0), 17)});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_NEAR(doc["success_probability"].get<double>(), 0.625, 1e-12);
    EXPECT_NEAR(doc["post_state"][0][0].get<double>(), 0.894427, 1e-6);

    auto zero = cli({"ancilla", graph, "--time", "0"});
    EXPECT_NEAR(json::parse(zero.out)["success_probability"].get<double>(), 1.0, 1e-12);

    std::string big = R"({"nodes": [)";
    for (int i = 0; i < 65; ++i) {
        big += (i ? ",\"" : "\"") + std::to_string(i) + "\"";
    }
    big += R"(], "initial": [{"node": "0", "re": 1}]})";
    EXPECT_EQ(cli({"ancilla", dir.write("big.json", big), "--time", "1"}).code, 1);
}

TEST(CliRun, JobsDoNotChangeOutput) {
    TempDir dir("qswlab-cli");
    const auto graph = dir.write("a.json", kAdmissible);
    for (const std::string engine : {"trajectories", "qtqc"}) {
        auto one = cli({"run", graph, "--engine", engine, "--num-traj", "500", "--seed", "8", "--jobs", "1"});
        auto many = cli({"run", graph, "--engine", engine, "--num-traj", "500", "--seed", "8", "--jobs", "4"});
        ASSERT_EQ(one.code, 0);
        EXPECT_EQ(testing::strip_wall_clock(one.out), testing::strip_wall_clock(many.out));
    }
}

}  // namespace
}  // namespace qswlab
