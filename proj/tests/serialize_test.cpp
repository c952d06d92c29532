// Copyright 2026 The qnc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qnc/serialize.hpp"

#include <gtest/gtest.h>

using namespace qnc;

TEST(serialize, format12) {
    EXPECT_EQ(format12(1.0), "1");
    EXPECT_EQ(format12(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format12(2.0 / 3.0), "0.666666666667");
    EXPECT_DOUBLE_EQ(round12(1.0 - 1e-15), 1.0);
}

TEST(serialize, coefficient_matrix_schema) {
    PrimeField f(3);
    const json m = to_json(coefficient_matrix(f));
    EXPECT_EQ(m["rows"].size(), 11u);
    EXPECT_EQ(m["rows"][0], "Z1");
    EXPECT_EQ(m["rows"][10], "Z13");
    EXPECT_EQ(m["columns"], json({"A1", "A2", "B1"}));
    EXPECT_EQ(m["entries"][6], json({2, 2, 2})); // Z9
    EXPECT_TRUE(m["attacked_edge"].is_null());

    const json a = to_json(attacked_coefficient_matrix(f, 7));
    EXPECT_EQ(a["columns"].size(), 4u);
    EXPECT_EQ(a["attacked_edge"], 7);
    EXPECT_EQ(a["entries"][10], json({1, 1, 1, 2})); // Z13'
}

TEST(serialize, attack_schema) {
    const json r = to_json(random_isometry(9, 3, 3, 12));
    EXPECT_EQ(r["edge"], 9);
    EXPECT_EQ(r["d_E"], 3);
    EXPECT_EQ(r["kind"], "random");
    EXPECT_EQ(r["seed"], 12);
    EXPECT_FALSE(r.contains("matrix"));

    const json k = to_json(keep_and_send_phi0(11, 3));
    EXPECT_EQ(k["kind"], "keep-phi0");
    ASSERT_TRUE(k.contains("matrix"));
    EXPECT_EQ(k["matrix"].size(), 9u);
    EXPECT_EQ(k["matrix"][0].size(), 3u);
    EXPECT_NEAR(k["matrix"][0][0][0].get<double>(), 0.57735026919, 1e-11);
}

TEST(serialize, run_schema) {
    auto cfg = ProtocolConfig::make(3, 1, {2, 0}, 4);
    const json j = to_json(run(cfg), cfg);
    EXPECT_EQ(j["p"], 3);
    EXPECT_EQ(j["b1"], 1);
    EXPECT_EQ(j["b2"], json({2, 0}));
    EXPECT_EQ(j["variant"], "full-pad");
    EXPECT_EQ(j["outcomes"].size(), 9u);
    EXPECT_TRUE(j["outcomes"].contains("C11"));
    EXPECT_TRUE(j["attack"].is_null());
    EXPECT_DOUBLE_EQ(j["fidelity"].get<double>(), 1.0);
}

TEST(serialize, report_schema_and_csv) {
    auto cfg = ProtocolConfig::make(3);
    cfg.attack = keep_and_send_phi0(11, 3);
    cfg.variant = PadVariant::WeakPadC11Only;
    const auto rep = analyze(cfg);
    const auto v = verify_independence(rep, 1e-9);
    const json j = to_json(rep, v);
    EXPECT_EQ(j["variant"], "weak-pad");
    EXPECT_EQ(j["records_total"], 6561);
    EXPECT_EQ(j["per_branch"].size(), 6561u);
    EXPECT_EQ(j["verdict"]["independent"], false);
    EXPECT_EQ(j["record_edges"], json({1, 2, 5, 6, 7, 8, 9, 10}));
    EXPECT_DOUBLE_EQ(j["product_deviation"].get<double>(), 0.666666666667);
    EXPECT_TRUE(j["verdict"]["worst_branch"].is_array());

    EXPECT_EQ(csv_header(), "edge,attack,variant,product_deviation,verdict,worst_branch");
    const std::string row = csv_row(rep, v);
    EXPECT_EQ(row.rfind("11,keep-phi0,weak-pad,0.666666666667,insecure,", 0), 0u) << row;
}

TEST(serialize, deterministic_dump) {
    auto cfg = ProtocolConfig::make(3);
    cfg.attack = random_isometry(6, 3, 3, 8);
    const auto a = to_json(analyze(cfg), verify_independence(analyze(cfg), 1e-9)).dump();
    const auto b = to_json(analyze(cfg), verify_independence(analyze(cfg), 1e-9)).dump();
    EXPECT_EQ(a, b);
}
