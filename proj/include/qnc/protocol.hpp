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
 * Quantum butterfly protocol: initialization, coded transmission over
 * e(5)..e(13), X-basis measurement of the interior registers with a
 * one-time-padded exchange of C10 and C11 between the sinks, and phase
 * recovery on the output registers H12 and H13.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "qnc/adversary.hpp"
#include "qnc/classical_code.hpp"
#include "qnc/density.hpp"
#include "qnc/ffield.hpp"
#include "qnc/qudit_engine.hpp"

namespace qnc {

enum class PadVariant {
    FullPad,        ///< both C10 and C11 one-time padded with B2 in F_p^2
    WeakPadC11Only, ///< only C11 padded; C10 travels in the clear
};

struct EntangledHalves {};

struct GivenStates {
    std::vector<Amplitude> psi1;
    std::vector<Amplitude> psi2;
};

using InputMode = std::variant<EntangledHalves, GivenStates>;

struct ProtocolConfig {
    PrimeField field;
    Fp b1;
    std::array<Fp, 2> b2;
    std::uint64_t seed = 0;
    InputMode input = EntangledHalves{};
    std::optional<AttackSpec> attack;
    PadVariant variant = PadVariant::FullPad;

    std::uint32_t p() const { return field.modulus(); }

    static ProtocolConfig make(std::uint32_t p, std::int64_t b1 = 0,
                               std::array<std::int64_t, 2> b2 = {0, 0}, std::uint64_t seed = 0) {
        PrimeField f(p);
        return ProtocolConfig{f, f(b1), {f(b2[0]), f(b2[1])}, seed, EntangledHalves{},
                              std::nullopt, PadVariant::FullPad};
    }
};

/// Edges whose registers are measured in Step 3, in measurement order.
inline constexpr std::array<int, 9> kMeasuredEdges = {1, 2, 5, 6, 7, 8, 9, 10, 11};

/// Outcome labels are defined so that the Step-4 correction X^{-sum C_k m_k}
/// cancels the measurement phase exactly.
inline constexpr XLabel kProtocolLabel = XLabel::Conjugate;

struct Transcript {
    std::map<int, Fp> outcomes;                      ///< C_k for k in {1,2,5..11}
    std::vector<std::pair<int, Fp>> public_plain;    ///< announced in the clear
    std::vector<std::pair<int, Fp>> public_padded;   ///< (k, C_k + pad) between the sinks
    std::vector<std::pair<int, Fp>> eve_record;      ///< what the wiretapper reads

    /// Outcomes as the sinks reconstruct them from public data and B2.
    std::map<int, Fp> sink_view(const std::array<Fp, 2>& b2) const {
        std::map<int, Fp> out(public_plain.begin(), public_plain.end());
        for (const auto& [k, v] : public_padded) {
            out.emplace(k, v - b2[k == 10 ? 0 : 1]);
        }
        return out;
    }
};

struct RunResult {
    SparseState final_state; ///< ref1, ref2 (entangled mode), H12, H13, E if attacked
    Transcript transcript;
    double branch_probability = 1.0;
    std::optional<double> fidelity; ///< against |Phi>_{ref1,H12} |Phi>_{ref2,H13}
};

/// |Phi> = p^{-1/2} sum_a |a, a>
inline SparseState bell_pair(std::uint32_t p, Reg first, Reg second) {
    SparseState::Map m;
    const double s = 1.0 / std::sqrt(static_cast<double>(p));
    for (std::uint32_t a = 0; a < p; ++a) {
        m.emplace(Basis{a, a}, Amplitude{s, 0.0});
    }
    return SparseState(RegisterLayout{{first, p}, {second, p}}, std::move(m));
}

/// |Phi>_{ref1,H12} (x) |Phi>_{ref2,H13} laid out as (ref1, ref2, H12, H13).
inline SparseState target_output(std::uint32_t p) {
    return bell_pair(p, Reg::Ref1, Reg::H12)
        .tensor(bell_pair(p, Reg::Ref2, Reg::H13))
        .reordered(RegisterLayout{{Reg::Ref1, p}, {Reg::Ref2, p}, {Reg::H12, p}, {Reg::H13, p}});
}

inline SparseState step1_initialize(const ProtocolConfig& config) {
    const std::uint32_t p = config.p();
    RegisterLayout zeros;
    for (int e = 5; e <= 13; ++e) {
        zeros.add({wire(e), p});
    }
    const SparseState work = SparseState::basis_state(zeros, Basis(zeros.size(), 0));

    if (const auto* given = std::get_if<GivenStates>(&config.input)) {
        for (const auto* psi : {&given->psi1, &given->psi2}) {
            double n = 0.0;
            for (const auto& a : *psi) {
                n += std::norm(a);
            }
            if (psi->size() != p || std::abs(n - 1.0) > 1e-10) {
                throw ConfigError("input states must be normalized vectors of length p");
            }
        }
        return SparseState::from_vector({Reg::H1, p}, given->psi1)
            .tensor(SparseState::from_vector({Reg::H2, p}, given->psi2))
            .tensor(work);
    }
    const SparseState halves = bell_pair(p, Reg::Ref1, Reg::H1).tensor(bell_pair(p, Reg::Ref2, Reg::H2));
    RegisterLayout order{{Reg::Ref1, p}, {Reg::Ref2, p}, {Reg::H1, p}, {Reg::H2, p}};
    return halves.reordered(order).tensor(work);
}

/// Applies U5..U13 in edge order; the attack (if any) acts on H_{j_E} right
/// after U_{j_E}, before any downstream gate reads it.
inline SparseState step2_transmit(SparseState state, Fp b1, const std::optional<AttackSpec>& attack,
                                  const ButterflyCode& code = standard_butterfly_code()) {
    const std::uint32_t p = b1.modulus();
    const PrimeField f(p);
    if (attack) {
        detail::check_edge(attack->edge);
        if (attack->p != p) {
            throw ConfigError("attack was built for a different field");
        }
    }
    for (const auto& rule : code.rules) {
        std::vector<AffineControl> controls;
        Fp constant = f.zero();
        for (const auto& [src, c] : rule.terms) {
            if (src == 3 || src == 4) {
                constant += c.in(f) * b1; // classical shared randomness
            } else {
                controls.push_back({wire(src), c.in(f)});
            }
        }
        state = apply_affine_adder(state, wire(rule.target), controls, constant);
        if (attack && attack->edge == rule.target) {
            state = apply_isometry(state, wire(rule.target), attack->isometry);
        }
    }
    return state;
}

namespace detail {

inline Transcript build_transcript(const std::map<int, Fp>& outcomes, const ProtocolConfig& config) {
    Transcript t;
    t.outcomes = outcomes;
    for (const auto& [k, c] : outcomes) {
        const bool padded = k == 11 || (k == 10 && config.variant == PadVariant::FullPad);
        if (padded) {
            t.public_padded.emplace_back(k, c + config.b2[k == 10 ? 0 : 1]);
        } else {
            t.public_plain.emplace_back(k, c);
            t.eve_record.emplace_back(k, c);
        }
    }
    return t;
}

} // namespace detail

struct MeasuredState {
    SparseState state;
    Transcript transcript;
    double probability = 1.0;
};

/// Samples the X-basis outcomes of H1, H2, H5..H11 in that order.
inline MeasuredState step3_measure(SparseState state, const ProtocolConfig& config,
                                   std::mt19937_64& rng) {
    std::map<int, Fp> outcomes;
    double prob = 1.0;
    for (int k : kMeasuredEdges) {
        auto m = measure_x_basis(state, wire(k), Sample{&rng}, kProtocolLabel);
        outcomes.emplace(k, config.field(m.outcome));
        prob *= m.probability;
        state = std::move(m.state);
    }
    return {std::move(state), detail::build_transcript(outcomes, config), prob};
}

/// Forces the given outcomes (one per measured edge).
inline MeasuredState step3_measure(SparseState state, const ProtocolConfig& config,
                                   const std::map<int, Fp>& forced) {
    std::map<int, Fp> outcomes;
    double prob = 1.0;
    for (int k : kMeasuredEdges) {
        const Fp c = forced.at(k);
        auto m = measure_x_basis(state, wire(k), Branch{c.value(), true}, kProtocolLabel);
        prob *= m.probability;
        if (m.zero_probability) {
            return {std::move(m.state), detail::build_transcript(forced, config), 0.0};
        }
        outcomes.emplace(k, c);
        state = std::move(m.state);
    }
    return {std::move(state), detail::build_transcript(outcomes, config), prob};
}

/// X^{-sum C_k m_k1} on H12 and X^{-sum C_k m_k2} on H13.
inline SparseState step4_recover(SparseState state, const Transcript& transcript,
                                 const ButterflyCode& code = standard_butterfly_code()) {
    const std::uint32_t p = state.layout().qudit_dim();
    const PrimeField f(p);
    const CoefficientMatrix m = coefficient_matrix(f, code);
    Fp s1 = f.zero();
    Fp s2 = f.zero();
    for (int k : kMeasuredEdges) {
        const auto it = transcript.outcomes.find(k);
        if (it == transcript.outcomes.end()) {
            throw ConfigError("missing outcome C" + std::to_string(k));
        }
        s1 += it->second * m.at(k, 0);
        s2 += it->second * m.at(k, 1);
    }
    state = apply_phase_power(state, Reg::H12, -static_cast<std::int64_t>(s1.value()));
    return apply_phase_power(state, Reg::H13, -static_cast<std::int64_t>(s2.value()));
}

inline std::optional<double> output_fidelity(const SparseState& final_state, const ProtocolConfig& config) {
    if (!std::holds_alternative<EntangledHalves>(config.input)) {
        return std::nullopt;
    }
    return fidelity_with_pure(final_state, target_output(config.p()));
}

/// Steps 1-4, deterministic given config.seed.
inline RunResult run(const ProtocolConfig& config) {
    std::mt19937_64 rng(config.seed);
    SparseState s = step2_transmit(step1_initialize(config), config.b1, config.attack);
    MeasuredState measured = step3_measure(std::move(s), config, rng);
    RunResult r;
    r.final_state = step4_recover(std::move(measured.state), measured.transcript);
    r.transcript = std::move(measured.transcript);
    r.branch_probability = measured.probability;
    r.fidelity = output_fidelity(r.final_state, config);
    return r;
}

inline constexpr std::uint64_t kDefaultBranchCap = 59049; // 3^10

/// Visits every nonzero-probability outcome combination of `enumerate`
/// (edges from kMeasuredEdges); the other measured registers are sampled
/// from config.seed. branch_probability is the probability of the
/// enumerated outcomes, so the visited probabilities sum to 1.
inline void enumerate_branches(const ProtocolConfig& config, std::span<const int> enumerate,
                               const std::function<void(const RunResult&)>& visit,
                               std::uint64_t cap = kDefaultBranchCap) {
    const std::uint32_t p = config.p();
    std::vector<bool> forced(kMeasuredEdges.size(), false);
    std::uint64_t count = 1;
    for (int e : enumerate) {
        bool found = false;
        for (std::size_t i = 0; i < kMeasuredEdges.size(); ++i) {
            if (kMeasuredEdges[i] == e) {
                found = !forced[i];
                forced[i] = true;
            }
        }
        if (!found) {
            throw ConfigError("edge " + std::to_string(e) + " is not a distinct measured edge");
        }
        count *= p;
        if (count > cap) {
            throw ConfigError("branch enumeration exceeds the configured cap");
        }
    }
    std::mt19937_64 rng(config.seed);
    const SparseState start = step2_transmit(step1_initialize(config), config.b1, config.attack);

    std::map<int, Fp> outcomes;
    std::function<void(std::size_t, const SparseState&, double)> dfs =
        [&](std::size_t level, const SparseState& s, double prob) {
            if (level == kMeasuredEdges.size()) {
                RunResult r;
                r.transcript = detail::build_transcript(outcomes, config);
                r.final_state = step4_recover(s, r.transcript);
                r.branch_probability = prob;
                r.fidelity = output_fidelity(r.final_state, config);
                visit(r);
                return;
            }
            const int edge = kMeasuredEdges[level];
            if (!forced[level]) {
                auto m = measure_x_basis(s, wire(edge), Sample{&rng}, kProtocolLabel);
                outcomes.insert_or_assign(edge, config.field(m.outcome));
                dfs(level + 1, m.state, prob);
                return;
            }
            for (auto& m : x_basis_branches(s, wire(edge), kProtocolLabel)) {
                if (m.zero_probability) {
                    continue;
                }
                outcomes.insert_or_assign(edge, config.field(m.outcome));
                dfs(level + 1, m.state, prob * m.probability);
            }
        };
    dfs(0, start, 1.0);
}

} // namespace qnc
