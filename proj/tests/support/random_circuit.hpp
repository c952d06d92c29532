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

// Seeded random circuits run through both the sparse engine and the dense
// reference; returns the largest amplitude mismatch.

#include <cstdint>
#include <random>
#include <vector>

#include "qnc/density.hpp"
#include "qnc/qudit_engine.hpp"
#include "support/dense_engine.hpp"

namespace qnc_test {

struct CircuitOutcome {
    double max_amplitude_error = 0.0;
    double max_trace_error = 0.0;
    int gates = 0;
    int adders = 0;
    int phases = 0;
    int isometries = 0;
    int measurements = 0;
    std::size_t registers = 0; ///< peak register count, E included
};

/// p = 0 picks 3 or 5 per circuit. At most `max_qudits` qudits (<= 5) plus E.
inline CircuitOutcome run_random_circuit(std::uint64_t seed, std::uint32_t fixed_p = 0,
                                         std::size_t max_qudits = 4) {
    using namespace qnc;
    std::mt19937_64 rng(seed);
    auto pick = [&](std::uint64_t n) { return static_cast<std::uint32_t>(rng() % n); };

    const std::uint32_t p = fixed_p != 0 ? fixed_p : (pick(2) == 0 ? 3 : 5);
    const std::size_t cap = p == 3 ? max_qudits : std::min<std::size_t>(max_qudits, 3);
    const std::size_t n = 2 + pick(cap - 1);
    const Reg ids[] = {Reg::H1, Reg::H2, Reg::H5, Reg::H6, Reg::H7};
    std::vector<Reg> regs(ids, ids + n);

    RegisterLayout layout;
    std::vector<std::uint32_t> dims;
    for (Reg r : regs) {
        layout.add({r, p});
        dims.push_back(p);
    }
    // random dense start, sparsified by dropping some basis states
    std::normal_distribution<double> g(0.0, 1.0);
    SparseState::Map amps;
    DenseState dense{dims, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.total_dim()))};
    for (std::size_t i = 0; i < layout.total_dim(); ++i) {
        if (pick(3) == 0) {
            continue;
        }
        const cd a(g(rng), g(rng));
        amps.emplace(layout.basis_of(i), a);
        dense.v(static_cast<Eigen::Index>(i)) = a;
    }
    if (amps.empty()) {
        amps.emplace(Basis(n, 0), cd(1.0, 0.0));
        dense.v(0) = 1.0;
    }
    SparseState sparse(layout, std::move(amps));
    sparse.normalize();
    dense.v.normalize();

    PrimeField f(p);
    bool has_e = false;
    CircuitOutcome out;
    out.registers = n;
    const int depth = 4 + static_cast<int>(pick(8));
    for (int step = 0; step < depth; ++step) {
        const std::uint32_t kind = pick(has_e || regs.size() <= 1 ? 3 : 4);
        const std::size_t r = pick(regs.size());
        if (kind <= 1 && regs.size() >= 2) {
            std::vector<AffineControl> ctl;
            std::vector<std::pair<std::size_t, std::uint32_t>> dctl;
            for (std::size_t c = 0; c < regs.size(); ++c) {
                if (c != r && pick(2) == 0) {
                    const std::uint32_t k = pick(p);
                    ctl.push_back({regs[c], f(k)});
                    dctl.emplace_back(c, k);
                }
            }
            const std::uint32_t k0 = pick(p);
            sparse = apply_affine_adder(sparse, regs[r], ctl, f(k0));
            adder(dense, r, dctl, k0, p);
            ++out.adders;
        } else if (kind <= 2) {
            const std::int64_t k = static_cast<std::int64_t>(pick(2 * p)) - static_cast<std::int64_t>(p);
            sparse = apply_phase_power(sparse, regs[r], k);
            phase(dense, r, k, p);
            ++out.phases;
        } else {
            const std::uint32_t d_e = 1 + pick(3);
            const Eigen::MatrixXcd v = random_isometry(p, d_e, rng);
            sparse = apply_isometry(sparse, regs[r], v);
            isometry(dense, r, v);
            has_e = true;
            ++out.isometries;
            out.registers = std::max(out.registers, regs.size() + 1);
        }
        ++out.gates;
        if (regs.size() >= 2 && pick(4) == 0) {
            const std::size_t m = pick(regs.size());
            const XLabel label = pick(2) == 0 ? XLabel::Phi : XLabel::Conjugate;
            auto branches = x_basis_branches(sparse, regs[m], label);
            std::uint32_t k = pick(p);
            while (branches[k].zero_probability) {
                k = (k + 1) % p;
            }
            const double prob_dense = measure_x(dense, m, k, label == XLabel::Phi ? -1 : 1);
            out.max_amplitude_error =
                std::max(out.max_amplitude_error, std::abs(prob_dense - branches[k].probability));
            sparse = std::move(branches[k].state);
            regs.erase(regs.begin() + static_cast<std::ptrdiff_t>(m));
            ++out.gates;
            ++out.measurements;
        }
    }
    const Eigen::VectorXcd sv = sparse.to_dense();
    out.max_amplitude_error = std::max(out.max_amplitude_error, (sv - dense.v).cwiseAbs().maxCoeff());

    // reduced state of the first surviving register
    const auto rho_s = partial_trace(sparse, {regs[0]});
    const auto rho_d = partial_trace(dense, {0});
    out.max_trace_error = (rho_s.matrix - rho_d).cwiseAbs().maxCoeff();
    return out;
}

} // namespace qnc_test
