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
 * Dense reduced states and the distance measures used by the secrecy checks.
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qnc/qudit_engine.hpp"

namespace qnc {

/// Dense density operator over a (sub)layout, index order as RegisterLayout::dense_index.
struct DensityMatrix {
    RegisterLayout layout;
    Eigen::MatrixXcd matrix;

    Eigen::Index dim() const { return matrix.rows(); }

    /// Hermitian within 1e-12, unit trace within 1e-10, eigenvalues >= -1e-10.
    bool is_valid() const {
        if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
            return false;
        }
        if (std::abs(matrix.trace() - Amplitude{1.0, 0.0}) > 1e-10) {
            return false;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff() >= -1e-10;
    }
};

inline DensityMatrix maximally_mixed(const RegisterLayout& layout) {
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    return {layout, Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d)};
}

inline DensityMatrix pure_density(const SparseState& psi) {
    const Eigen::VectorXcd v = psi.to_dense();
    return {psi.layout(), v * v.adjoint()};
}

namespace detail {

inline RegisterLayout sub_layout(const RegisterLayout& layout, std::span<const Reg> keep) {
    if (keep.empty()) {
        throw ConfigError("partial trace needs a non-empty keep set");
    }
    RegisterLayout out;
    for (Reg r : keep) {
        out.add({r, layout.dim(r)});
    }
    return out;
}

} // namespace detail

/// rho_keep = Tr_rest |psi><psi|, registers ordered as in `keep`.
inline DensityMatrix partial_trace(const SparseState& state, std::span<const Reg> keep) {
    const auto& layout = state.layout();
    RegisterLayout kl = detail::sub_layout(layout, keep);
    std::vector<std::size_t> kidx;
    for (Reg r : keep) {
        kidx.push_back(layout.index_of(r));
    }
    std::vector<std::size_t> ridx;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (std::find(kidx.begin(), kidx.end(), i) == kidx.end()) {
            ridx.push_back(i);
        }
    }
    std::map<Basis, std::vector<std::pair<Eigen::Index, Amplitude>>> groups;
    Basis k(kidx.size());
    for (const auto& [t, a] : state.amplitudes()) {
        for (std::size_t i = 0; i < kidx.size(); ++i) {
            k[i] = t[kidx[i]];
        }
        Basis r(ridx.size());
        for (std::size_t i = 0; i < ridx.size(); ++i) {
            r[i] = t[ridx[i]];
        }
        groups[std::move(r)].emplace_back(static_cast<Eigen::Index>(kl.dense_index(k)), a);
    }
    const auto d = static_cast<Eigen::Index>(kl.total_dim());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& [r, entries] : groups) {
        for (const auto& [i, ai] : entries) {
            for (const auto& [j, aj] : entries) {
                rho(i, j) += ai * std::conj(aj);
            }
        }
    }
    return {std::move(kl), std::move(rho)};
}

inline DensityMatrix partial_trace(const SparseState& state, std::initializer_list<Reg> keep) {
    return partial_trace(state, std::span<const Reg>(keep.begin(), keep.size()));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Reg> keep) {
    const auto& layout = rho.layout;
    RegisterLayout kl = detail::sub_layout(layout, keep);
    std::vector<std::size_t> kidx;
    for (Reg r : keep) {
        kidx.push_back(layout.index_of(r));
    }
    std::vector<std::size_t> ridx;
    RegisterLayout rl;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (std::find(kidx.begin(), kidx.end(), i) == kidx.end()) {
            ridx.push_back(i);
            rl.add(layout[i]);
        }
    }
    const auto d = static_cast<Eigen::Index>(kl.total_dim());
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    std::vector<Eigen::Index> kpos(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> rpos(static_cast<std::size_t>(n));
    Basis k(kidx.size());
    Basis r(ridx.size());
    for (Eigen::Index idx = 0; idx < n; ++idx) {
        const Basis t = layout.basis_of(static_cast<std::size_t>(idx));
        for (std::size_t i = 0; i < kidx.size(); ++i) {
            k[i] = t[kidx[i]];
        }
        for (std::size_t i = 0; i < ridx.size(); ++i) {
            r[i] = t[ridx[i]];
        }
        kpos[static_cast<std::size_t>(idx)] = static_cast<Eigen::Index>(kl.dense_index(k));
        rpos[static_cast<std::size_t>(idx)] = static_cast<Eigen::Index>(rl.dense_index(r));
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (rpos[static_cast<std::size_t>(i)] == rpos[static_cast<std::size_t>(j)]) {
                out(kpos[static_cast<std::size_t>(i)], kpos[static_cast<std::size_t>(j)]) += rho.matrix(i, j);
            }
        }
    }
    return {std::move(kl), std::move(out)};
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<Reg> keep) {
    return partial_trace(rho, std::span<const Reg>(keep.begin(), keep.size()));
}

/// Kronecker product; b's registers follow a's.
inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    RegisterLayout layout = a.layout;
    for (const auto& r : b.layout.registers()) {
        layout.add(r);
    }
    const Eigen::Index da = a.dim();
    const Eigen::Index db = b.dim();
    Eigen::MatrixXcd m(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < da; ++j) {
            m.block(i * db, j * db, db, db) = a.matrix(i, j) * b.matrix;
        }
    }
    return {std::move(layout), std::move(m)};
}

/// Same operator with registers permuted into `order`'s order.
inline DensityMatrix reordered(const DensityMatrix& rho, const RegisterLayout& order) {
    if (order.size() != rho.layout.size()) {
        throw ConfigError("reorder target has a different register set");
    }
    const auto n = rho.dim();
    std::vector<Eigen::Index> pos(static_cast<std::size_t>(n));
    std::vector<std::size_t> src(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        src[i] = rho.layout.index_of(order[i].id);
    }
    Basis u(order.size());
    for (Eigen::Index idx = 0; idx < n; ++idx) {
        const Basis t = rho.layout.basis_of(static_cast<std::size_t>(idx));
        for (std::size_t i = 0; i < order.size(); ++i) {
            u[i] = t[src[i]];
        }
        pos[static_cast<std::size_t>(idx)] = static_cast<Eigen::Index>(order.dense_index(u));
    }
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]) = rho.matrix(i, j);
        }
    }
    return {order, std::move(m)};
}

/// (1/2) || a - b ||_1 for Hermitian difference.
inline double trace_norm_half(const Eigen::MatrixXcd& diff) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Trace distance of a Hermitian difference, replaced by the upper bound
/// (sqrt(n)/2) ||diff||_F whenever that bound is already below `floor`.
inline double certified_trace_norm_half(const Eigen::MatrixXcd& diff, double floor = 1e-11) {
    const double bound = 0.5 * std::sqrt(static_cast<double>(diff.rows())) * diff.norm();
    if (bound <= floor) {
        return bound;
    }
    return trace_norm_half(diff);
}

inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw ConfigError("trace distance of operators with different dimensions");
    }
    if (!(rho.layout == sigma.layout)) {
        return trace_norm_half(rho.matrix - reordered(sigma, rho.layout).matrix);
    }
    return trace_norm_half(rho.matrix - sigma.matrix);
}

/// <psi| rho |psi>. Global phase of psi does not matter.
inline double fidelity_with_pure(const DensityMatrix& rho, const SparseState& psi) {
    if (rho.layout.size() != psi.layout().size() ||
        rho.layout.total_dim() != psi.layout().total_dim()) {
        throw ConfigError("fidelity of a state against a vector of another dimension");
    }
    const Eigen::VectorXcd v = psi.reordered(rho.layout).to_dense();
    return (v.adjoint() * rho.matrix * v)(0, 0).real();
}

/// TD(rho_AB, rho_A (x) rho_B) with A = `part_a`, B = the remaining registers.
inline double product_deviation(const DensityMatrix& rho, std::span<const Reg> part_a) {
    std::vector<Reg> part_b;
    for (const auto& r : rho.layout.registers()) {
        if (std::find(part_a.begin(), part_a.end(), r.id) == part_a.end()) {
            part_b.push_back(r.id);
        }
    }
    if (part_b.empty()) {
        throw ConfigError("product deviation needs a proper bipartition");
    }
    const DensityMatrix prod = tensor(partial_trace(rho, part_a), partial_trace(rho, part_b));
    return trace_distance(rho, prod);
}

inline double product_deviation(const DensityMatrix& rho, std::initializer_list<Reg> part_a) {
    return product_deviation(rho, std::span<const Reg>(part_a.begin(), part_a.size()));
}

} // namespace qnc
