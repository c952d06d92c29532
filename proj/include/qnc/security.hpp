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

/**
 * @file
 * Wiretapper's view of the protocol and the independence certificate.
 *
 * For every value of the eavesdropper's classical record (the outcomes she
 * reads from the public channel) we build the conditional state on
 * ref1 (x) ref2 (x) E. The source randomness B1 is averaged with its prior,
 * the hidden outcomes are traced out and the output registers H12, H13 are
 * discarded. Secrecy holds when each conditional state equals
 * (I / p^2) (x) (sum_b sigma_b) / p and the record itself is uniform.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qnc/adversary.hpp"
#include "qnc/classical_code.hpp"
#include "qnc/density.hpp"
#include "qnc/protocol.hpp"
#include "qnc/qudit_engine.hpp"

namespace qnc {

struct SecurityOptions {
    std::uint64_t record_cap = 6561; ///< 3^8
    bool allow_sampling = false;
    std::size_t samples = 512;
    std::uint64_t sample_seed = 0;
    bool keep_states = false;
    /// Cross-check: also measure H10, H11 and apply the Step-4 phases before
    /// discarding H12, H13. The verdict must not change.
    bool apply_recovery = false;
    std::vector<double> b1_weights; ///< prior on B1; empty means uniform
    bool with_fidelity = false;
};

struct BranchSummary {
    std::vector<std::uint32_t> record; ///< outcome values on record_edges
    double probability = 0.0;
    double ref_deviation = 0.0;     ///< TD(rho_ref|c, I/p^2)
    double eve_deviation = 0.0;     ///< TD(rho|c, I/p^2 (x) sigma_sum/p)
    double product_deviation = 0.0; ///< TD(rho|c, rho_ref (x) rho_E|c)
};

struct SecurityReport {
    AttackSpec attack;
    PadVariant variant = PadVariant::FullPad;
    std::uint32_t p = 0;
    std::vector<int> record_edges;
    bool exhaustive = true;
    std::uint64_t records_total = 0;
    std::vector<BranchSummary> per_branch;
    std::vector<DensityMatrix> conditional_states; ///< parallel to per_branch if kept
    DensityMatrix reference_state;                 ///< aggregate ref1 (x) ref2
    DensityMatrix eve_state;                       ///< aggregate E
    DensityMatrix expected_eve_state;              ///< sigma_sum / p
    double product_deviation = 0.0;
    double reference_deviation_from_maximally_mixed = 0.0;
    double sigma_sum_match = 0.0;
    double record_tv_distance = 0.0;
    std::optional<double> output_fidelity_under_attack;
};

/// Edges whose outcomes the wiretapper reads in the clear.
inline std::vector<int> eve_record_edges(PadVariant variant) {
    std::vector<int> out = {1, 2, 5, 6, 7, 8, 9};
    if (variant == PadVariant::WeakPadC11Only) {
        out.push_back(10);
    }
    return out;
}

namespace detail {

/// Post-transmission state flattened for repeated projection.
struct CompiledBranchState {
    double weight = 0.0;
    std::vector<Eigen::Index> kept;          ///< index in ref1 (x) ref2 (x) E
    std::vector<std::size_t> group;          ///< traced-out tuple id
    std::vector<std::uint32_t> visible;      ///< n_entries x n_visible
    std::vector<std::uint32_t> hidden;       ///< n_entries x n_hidden (recovery mode)
    std::vector<std::uint32_t> outputs;      ///< n_entries x 2 (z12, z13)
    std::vector<Amplitude> amp;
    std::size_t num_groups = 0;
};

inline CompiledBranchState compile_state(const SparseState& s, double weight,
                                         std::span<const int> visible_edges,
                                         std::span<const int> hidden_edges) {
    const auto& layout = s.layout();
    const std::uint32_t p = layout.qudit_dim();
    const std::uint32_t d_e = layout.contains(Reg::E) ? layout.dim(Reg::E) : 1;
    const std::size_t i_r1 = layout.index_of(Reg::Ref1);
    const std::size_t i_r2 = layout.index_of(Reg::Ref2);
    const std::optional<std::size_t> i_e =
        layout.contains(Reg::E) ? std::optional(layout.index_of(Reg::E)) : std::nullopt;
    std::vector<std::size_t> vis;
    for (int e : visible_edges) {
        vis.push_back(layout.index_of(wire(e)));
    }
    std::vector<std::size_t> hid;
    for (int e : hidden_edges) {
        hid.push_back(layout.index_of(wire(e)));
    }
    const std::size_t i12 = layout.index_of(Reg::H12);
    const std::size_t i13 = layout.index_of(Reg::H13);
    std::vector<std::size_t> traced;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const bool used = i == i_r1 || i == i_r2 || (i_e && i == *i_e) ||
                          std::find(vis.begin(), vis.end(), i) != vis.end() ||
                          std::find(hid.begin(), hid.end(), i) != hid.end();
        if (!used) {
            traced.push_back(i);
        }
    }

    CompiledBranchState c;
    c.weight = weight;
    std::map<Basis, std::size_t> group_ids;
    for (const auto& [t, a] : s.amplitudes()) {
        const std::uint32_t e = i_e ? t[*i_e] : 0;
        c.kept.push_back(static_cast<Eigen::Index>((t[i_r1] * p + t[i_r2]) * d_e + e));
        Basis key;
        for (std::size_t i : traced) {
            key.push_back(t[i]);
        }
        auto [it, inserted] = group_ids.try_emplace(std::move(key), group_ids.size());
        c.group.push_back(it->second);
        for (std::size_t i : vis) {
            c.visible.push_back(t[i]);
        }
        for (std::size_t i : hid) {
            c.hidden.push_back(t[i]);
        }
        c.outputs.push_back(t[i12]);
        c.outputs.push_back(t[i13]);
        c.amp.push_back(a);
    }
    c.num_groups = group_ids.size();
    return c;
}

/// Scratch buffers for sparse rank-one accumulation.
struct Accumulator {
    std::size_t dim = 0;
    std::vector<Amplitude> buf;
    std::vector<std::uint8_t> mark;
    std::vector<std::vector<Eigen::Index>> touched;

    void reset(std::size_t groups, std::size_t d) {
        dim = d;
        if (buf.size() < groups * d) {
            buf.assign(groups * d, Amplitude{});
            mark.assign(groups * d, 0);
        }
        touched.resize(std::max(touched.size(), groups));
    }

    void add(std::size_t g, Eigen::Index k, Amplitude v) {
        const std::size_t idx = g * dim + static_cast<std::size_t>(k);
        if (!mark[idx]) {
            mark[idx] = 1;
            touched[g].push_back(k);
        }
        buf[idx] += v;
    }

    void flush_into(Eigen::MatrixXcd& rho, double weight, std::size_t groups) {
        for (std::size_t g = 0; g < groups; ++g) {
            auto& ks = touched[g];
            for (Eigen::Index i : ks) {
                const Amplitude vi = buf[g * dim + static_cast<std::size_t>(i)] * weight;
                for (Eigen::Index j : ks) {
                    rho(i, j) += vi * std::conj(buf[g * dim + static_cast<std::size_t>(j)]);
                }
            }
            for (Eigen::Index i : ks) {
                buf[g * dim + static_cast<std::size_t>(i)] = Amplitude{};
                mark[g * dim + static_cast<std::size_t>(i)] = 0;
            }
            ks.clear();
        }
    }
};

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd m(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            m.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return m;
}

} // namespace detail

/// Mean post-recovery fidelity with |Phi>|Phi> under the configured attack:
/// exact branch average when p^9 <= cap, otherwise `trials` seeded runs.
inline double attacked_fidelity(const ProtocolConfig& config, std::uint64_t cap = kDefaultBranchCap,
                                std::size_t trials = 256) {
    if (!config.attack) {
        throw ConfigError("attacked fidelity needs an attack");
    }
    std::uint64_t branches = 1;
    for (std::size_t i = 0; i < kMeasuredEdges.size(); ++i) {
        branches *= config.p();
    }
    if (branches <= cap) {
        double acc = 0.0;
        enumerate_branches(
            config, kMeasuredEdges,
            [&](const RunResult& r) { acc += r.branch_probability * r.fidelity.value_or(0.0); }, cap);
        return acc;
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        ProtocolConfig c = config;
        c.seed = config.seed + t;
        acc += run(c).fidelity.value_or(0.0);
    }
    return acc / static_cast<double>(trials);
}

/// Builds the conditional states for every (or a sample of) wiretapper
/// record values. Requires an attack and entangled-halves input.
inline SecurityReport analyze(const ProtocolConfig& config, const SecurityOptions& opts = {}) {
    if (!config.attack) {
        throw ConfigError("security analysis needs an attack");
    }
    if (!std::holds_alternative<EntangledHalves>(config.input)) {
        throw ConfigError("security analysis needs entangled-halves input");
    }
    const AttackSpec& attack = *config.attack;
    const std::uint32_t p = config.p();
    const PrimeField& f = config.field;
    const std::uint32_t d_e = attack.d_e;
    const Eigen::Index dim_ref = static_cast<Eigen::Index>(p) * p;
    const Eigen::Index dim_k = dim_ref * d_e;

    std::vector<double> weights = opts.b1_weights;
    if (weights.empty()) {
        weights.assign(p, 1.0 / p);
    }
    if (weights.size() != p) {
        throw ConfigError("b1 prior must have p entries");
    }
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) {
        w /= wsum;
    }

    SecurityReport report;
    report.attack = attack;
    report.variant = config.variant;
    report.p = p;
    report.record_edges = eve_record_edges(config.variant);
    const std::vector<int>& visible = report.record_edges;
    std::vector<int> hidden;
    if (opts.apply_recovery) {
        for (int e : {10, 11}) {
            if (std::find(visible.begin(), visible.end(), e) == visible.end()) {
                hidden.push_back(e);
            }
        }
    }

    const RegisterLayout ref_layout{{Reg::Ref1, p}, {Reg::Ref2, p}};
    const RegisterLayout eve_layout{{Reg::E, d_e}};
    report.reference_state = {ref_layout, Eigen::MatrixXcd::Zero(dim_ref, dim_ref)};
    report.eve_state = {eve_layout, Eigen::MatrixXcd::Zero(d_e, d_e)};
    report.expected_eve_state = {eve_layout, sigma_sum(attack) / static_cast<double>(p)};

    std::vector<detail::CompiledBranchState> compiled;
    const SparseState initial = step1_initialize(config);
    for (std::uint32_t b = 0; b < p; ++b) {
        if (weights[b] == 0.0) {
            continue;
        }
        const SparseState s = step2_transmit(initial, f(b), attack);
        report.reference_state.matrix += weights[b] * partial_trace(s, {Reg::Ref1, Reg::Ref2}).matrix;
        report.eve_state.matrix += weights[b] * partial_trace(s, {Reg::E}).matrix;
        compiled.push_back(detail::compile_state(s, weights[b], visible, hidden));
    }
    const Eigen::MatrixXcd ref_mixed = Eigen::MatrixXcd::Identity(dim_ref, dim_ref) / static_cast<double>(dim_ref);
    report.reference_deviation_from_maximally_mixed = trace_norm_half(report.reference_state.matrix - ref_mixed);
    report.sigma_sum_match = trace_norm_half(report.eve_state.matrix - report.expected_eve_state.matrix);
    const Eigen::MatrixXcd ideal_product = detail::kron(ref_mixed, report.expected_eve_state.matrix);

    // Record values to visit.
    const std::size_t nv = visible.size();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < nv; ++i) {
        total *= p;
    }
    report.records_total = total;
    std::vector<std::uint64_t> records;
    if (total <= opts.record_cap) {
        records.resize(total);
        std::iota(records.begin(), records.end(), 0);
    } else if (opts.allow_sampling) {
        report.exhaustive = false;
        std::mt19937_64 rng(opts.sample_seed);
        for (std::size_t i = 0; i < opts.samples; ++i) {
            records.push_back(rng() % total);
        }
    } else {
        throw ConfigError("record enumeration exceeds the cap; enable sampling");
    }

    const auto w = omega_table(p);
    const std::size_t nh = hidden.size();
    std::uint64_t hidden_combos = 1;
    for (std::size_t i = 0; i < nh; ++i) {
        hidden_combos *= p;
    }
    const double scale = std::pow(static_cast<double>(p), -0.5 * static_cast<double>(nv + nh));
    const CoefficientMatrix m = coefficient_matrix(f);
    std::map<int, std::pair<std::uint32_t, std::uint32_t>> m12; // edge -> (m_k1, m_k2)
    for (int k : kMeasuredEdges) {
        m12[k] = {m.at(k, 0).value(), m.at(k, 1).value()};
    }

    detail::Accumulator acc;
    double weighted_product = 0.0;
    double tv = 0.0;
    const double uniform = 1.0 / static_cast<double>(total);
    std::vector<std::uint32_t> c(nv);
    std::vector<std::uint32_t> h(nh);
    for (std::uint64_t rec : records) {
        std::uint64_t r = rec;
        for (std::size_t i = nv; i-- > 0;) {
            c[i] = static_cast<std::uint32_t>(r % p);
            r /= p;
        }
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim_k, dim_k);
        for (const auto& cs : compiled) {
            for (std::uint64_t hc = 0; hc < hidden_combos; ++hc) {
                std::uint64_t hr = hc;
                for (std::size_t i = nh; i-- > 0;) {
                    h[i] = static_cast<std::uint32_t>(hr % p);
                    hr /= p;
                }
                // Step-4 exponents for this full outcome assignment.
                std::uint64_t s1 = 0;
                std::uint64_t s2 = 0;
                if (opts.apply_recovery) {
                    for (std::size_t i = 0; i < nv; ++i) {
                        s1 += std::uint64_t{c[i]} * m12[visible[i]].first;
                        s2 += std::uint64_t{c[i]} * m12[visible[i]].second;
                    }
                    for (std::size_t i = 0; i < nh; ++i) {
                        s1 += std::uint64_t{h[i]} * m12[hidden[i]].first;
                        s2 += std::uint64_t{h[i]} * m12[hidden[i]].second;
                    }
                }
                acc.reset(cs.num_groups, static_cast<std::size_t>(dim_k));
                for (std::size_t n = 0; n < cs.amp.size(); ++n) {
                    std::uint64_t ex = 0;
                    for (std::size_t i = 0; i < nv; ++i) {
                        ex += std::uint64_t{c[i]} * cs.visible[n * nv + i];
                    }
                    for (std::size_t i = 0; i < nh; ++i) {
                        ex += std::uint64_t{h[i]} * cs.hidden[n * nh + i];
                    }
                    if (opts.apply_recovery) {
                        ex += (p - s1 % p) * cs.outputs[2 * n] + (p - s2 % p) * cs.outputs[2 * n + 1];
                    }
                    acc.add(cs.group[n], cs.kept[n], cs.amp[n] * w[ex % p] * scale);
                }
                acc.flush_into(rho, cs.weight, cs.num_groups);
            }
        }
        BranchSummary b;
        b.record = c;
        b.probability = rho.trace().real();
        if (b.probability > 1e-300) {
            rho /= b.probability;
            Eigen::MatrixXcd rho_ref = Eigen::MatrixXcd::Zero(dim_ref, dim_ref);
            Eigen::MatrixXcd rho_e = Eigen::MatrixXcd::Zero(d_e, d_e);
            for (Eigen::Index i = 0; i < dim_ref; ++i) {
                rho_e += rho.block(i * d_e, i * d_e, d_e, d_e);
                for (Eigen::Index j = 0; j < dim_ref; ++j) {
                    rho_ref(i, j) = rho.block(i * d_e, j * d_e, d_e, d_e).trace();
                }
            }
            b.ref_deviation = trace_norm_half(rho_ref - ref_mixed);
            b.eve_deviation = certified_trace_norm_half(rho - ideal_product);
            b.product_deviation =
                certified_trace_norm_half(rho - detail::kron(report.reference_state.matrix, rho_e));
        }
        weighted_product += b.probability * b.product_deviation;
        tv += std::abs(b.probability - uniform);
        if (opts.keep_states) {
            report.conditional_states.push_back(
                {RegisterLayout{{Reg::Ref1, p}, {Reg::Ref2, p}, {Reg::E, d_e}}, std::move(rho)});
        }
        report.per_branch.push_back(std::move(b));
    }
    if (report.exhaustive) {
        report.product_deviation = weighted_product;
        report.record_tv_distance = 0.5 * tv;
    } else {
        const double n = static_cast<double>(records.size());
        report.product_deviation = weighted_product * static_cast<double>(total) / n;
        report.record_tv_distance = 0.5 * tv * static_cast<double>(total) / n;
    }
    if (opts.with_fidelity) {
        report.output_fidelity_under_attack = attacked_fidelity(config);
    }
    return report;
}

struct IndependenceVerdict {
    bool independent = false;
    bool reference_ok = false; ///< every conditional ref marginal is I/p^2
    bool eve_ok = false;       ///< every conditional state is (I/p^2) (x) sigma_sum/p
    bool record_ok = false;    ///< record distribution is uniform
    double worst_deviation = 0.0;
    std::optional<std::size_t> worst_branch;
    double record_tv_distance = 0.0;
};

inline IndependenceVerdict verify_independence(const SecurityReport& report, double tol) {
    IndependenceVerdict v;
    double worst_ref = 0.0;
    double worst_eve = 0.0;
    for (std::size_t i = 0; i < report.per_branch.size(); ++i) {
        const auto& b = report.per_branch[i];
        worst_ref = std::max(worst_ref, b.ref_deviation);
        worst_eve = std::max(worst_eve, b.eve_deviation);
        const double d = std::max(b.ref_deviation, b.eve_deviation);
        if (!v.worst_branch || d > v.worst_deviation) {
            v.worst_deviation = d;
            v.worst_branch = i;
        }
    }
    v.record_tv_distance = report.record_tv_distance;
    v.reference_ok = worst_ref <= tol;
    v.eve_ok = worst_eve <= tol;
    v.record_ok = report.record_tv_distance <= tol;
    v.independent = v.reference_ok && v.eve_ok && v.record_ok;
    return v;
}

} // namespace qnc
