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

#pragma once

// JSON and CSV encodings of matrices, attacks, runs and security reports.
// Floating-point values carry 12 significant digits.

#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"

#include "qnc/adversary.hpp"
#include "qnc/classical_code.hpp"
#include "qnc/protocol.hpp"
#include "qnc/qudit_engine.hpp"
#include "qnc/security.hpp"

namespace qnc {

using nlohmann::json;

inline std::string format12(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// Rounds to 12 significant digits so the JSON writer prints at most that many.
inline double round12(double x) { return std::stod(format12(x)); }

inline std::string variant_name(PadVariant v) {
    return v == PadVariant::FullPad ? "full-pad" : "weak-pad";
}

inline std::string attack_kind_name(AttackKind k) {
    switch (k) {
    case AttackKind::IdentityForward:
        return "identity";
    case AttackKind::KeepAndSendPhi0:
        return "keep-phi0";
    case AttackKind::RandomIsometry:
        return "random";
    case AttackKind::MeasureAndResendZ:
        return "measure-z";
    case AttackKind::MeasureAndResendX:
        return "measure-x";
    case AttackKind::Explicit:
        return "explicit";
    }
    return "explicit";
}

inline json to_json(const CoefficientMatrix& m) {
    json rows = json::array();
    for (int r : m.rows()) {
        rows.push_back("Z" + std::to_string(r));
    }
    json entries = json::array();
    for (int r : m.rows()) {
        json row = json::array();
        for (const Fp& x : m.row(r)) {
            row.push_back(x.value());
        }
        entries.push_back(std::move(row));
    }
    json out = {{"rows", rows}, {"columns", m.columns()}, {"entries", entries}};
    out["attacked_edge"] = m.attacked_edge() ? json(*m.attacked_edge()) : json(nullptr);
    return out;
}

inline json to_json(const AttackSpec& a) {
    json out = {{"edge", a.edge}, {"d_E", a.d_e}, {"label", a.label}, {"kind", attack_kind_name(a.kind)}};
    if (a.seed) {
        out["seed"] = *a.seed;
    } else {
        json rows = json::array();
        for (Eigen::Index i = 0; i < a.isometry.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < a.isometry.cols(); ++j) {
                row.push_back({round12(a.isometry(i, j).real()), round12(a.isometry(i, j).imag())});
            }
            rows.push_back(std::move(row));
        }
        out["matrix"] = std::move(rows);
    }
    return out;
}

inline json to_json(const SparseState& s) {
    json out = json::array();
    for (const auto& [t, a] : s.amplitudes()) {
        out.push_back({t, round12(a.real()), round12(a.imag())});
    }
    return out;
}

inline json to_json(const RunResult& r, const ProtocolConfig& config) {
    json outcomes = json::object();
    for (const auto& [k, c] : r.transcript.outcomes) {
        outcomes["C" + std::to_string(k)] = c.value();
    }
    json out = {
        {"p", config.p()},
        {"b1", config.b1.value()},
        {"b2", {config.b2[0].value(), config.b2[1].value()}},
        {"seed", config.seed},
        {"variant", variant_name(config.variant)},
        {"outcomes", outcomes},
        {"branch_probability", round12(r.branch_probability)},
    };
    out["attack"] = config.attack ? to_json(*config.attack) : json(nullptr);
    out["fidelity"] = r.fidelity ? json(round12(*r.fidelity)) : json(nullptr);
    return out;
}

inline json to_json(const SecurityReport& rep, const IndependenceVerdict& verdict) {
    json branches = json::array();
    for (const auto& b : rep.per_branch) {
        branches.push_back({{"record", b.record},
                            {"probability", round12(b.probability)},
                            {"ref_deviation", round12(b.ref_deviation)},
                            {"eve_deviation", round12(b.eve_deviation)},
                            {"product_deviation", round12(b.product_deviation)}});
    }
    json out = {
        {"p", rep.p},
        {"attack", to_json(rep.attack)},
        {"variant", variant_name(rep.variant)},
        {"record_edges", rep.record_edges},
        {"exhaustive", rep.exhaustive},
        {"records_total", rep.records_total},
        {"records_evaluated", rep.per_branch.size()},
        {"product_deviation", round12(rep.product_deviation)},
        {"reference_deviation_from_maximally_mixed", round12(rep.reference_deviation_from_maximally_mixed)},
        {"sigma_sum_match", round12(rep.sigma_sum_match)},
        {"record_tv_distance", round12(rep.record_tv_distance)},
        {"verdict",
         {{"independent", verdict.independent},
          {"reference_ok", verdict.reference_ok},
          {"eve_ok", verdict.eve_ok},
          {"record_ok", verdict.record_ok},
          {"worst_deviation", round12(verdict.worst_deviation)},
          {"worst_branch", verdict.worst_branch ? json(rep.per_branch[*verdict.worst_branch].record)
                                                : json(nullptr)}}},
        {"per_branch", branches},
    };
    out["output_fidelity_under_attack"] =
        rep.output_fidelity_under_attack ? json(round12(*rep.output_fidelity_under_attack)) : json(nullptr);
    return out;
}

inline std::string csv_header() {
    return "edge,attack,variant,product_deviation,verdict,worst_branch";
}

inline std::string csv_row(const SecurityReport& rep, const IndependenceVerdict& v) {
    std::ostringstream os;
    os << rep.attack.edge << ',' << rep.attack.label;
    if (rep.attack.seed) {
        os << '#' << *rep.attack.seed;
    }
    os << ',' << variant_name(rep.variant) << ',' << format12(rep.product_deviation) << ','
       << (v.independent ? "secure" : "insecure") << ',';
    if (v.worst_branch) {
        const auto& rec = rep.per_branch[*v.worst_branch].record;
        for (std::size_t i = 0; i < rec.size(); ++i) {
            os << (i ? "-" : "") << rec[i];
        }
    }
    return os.str();
}

} // namespace qnc
