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
 * Single-edge wiretap attacks.
 *
 * Every attack is a Stinespring isometry V: H_edge -> H_E (x) H_edge with
 * the environment kept by the eavesdropper, so Lambda(X) = V X V^dagger.
 * Row index of V is e * p + x for |e>_E (x) |x>_edge.
 */

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "qnc/classical_code.hpp"
#include "qnc/qudit_engine.hpp"

namespace qnc {

enum class AttackKind {
    IdentityForward,
    KeepAndSendPhi0,
    RandomIsometry,
    MeasureAndResendZ,
    MeasureAndResendX,
    Explicit,
};

struct AttackSpec {
    int edge = 0;
    std::uint32_t p = 0;
    std::uint32_t d_e = 1;
    Eigen::MatrixXcd isometry; ///< (d_e * p) x p
    std::string label;
    AttackKind kind = AttackKind::Explicit;
    std::optional<std::uint64_t> seed;
};

namespace detail {

inline void check_edge(int edge) {
    if (!is_attackable_edge(edge)) {
        throw ConfigError("attacks target a quantum edge in 5..11, got " + std::to_string(edge));
    }
}

/// |phi_b> = p^{-1/2} sum_a omega^{ab} |a>
inline Eigen::VectorXcd fourier_vector(std::uint32_t b, std::uint32_t p) {
    Eigen::VectorXcd v(p);
    for (std::uint32_t a = 0; a < p; ++a) {
        v(a) = omega_pow(static_cast<std::int64_t>(a) * b, p) / std::sqrt(static_cast<double>(p));
    }
    return v;
}

} // namespace detail

/// Wraps an explicit isometry after validating it.
inline AttackSpec make_attack(int edge, std::uint32_t p, Eigen::MatrixXcd v, std::string label,
                              AttackKind kind = AttackKind::Explicit,
                              std::optional<std::uint64_t> seed = std::nullopt) {
    detail::check_edge(edge);
    if (v.cols() != static_cast<Eigen::Index>(p) || v.rows() == 0 || v.rows() % p != 0) {
        throw ConfigError("attack isometry must have shape (d_E * p) x p");
    }
    if (!is_isometry(v)) {
        throw ConfigError("attack matrix is not an isometry");
    }
    const auto d_e = static_cast<std::uint32_t>(v.rows() / p);
    return AttackSpec{edge, p, d_e, std::move(v), std::move(label), kind, seed};
}

/// Forwards the edge untouched; E is a trivial one-dimensional register.
inline AttackSpec identity_forward(int edge, std::uint32_t p) {
    return make_attack(edge, p, Eigen::MatrixXcd::Identity(p, p), "identity",
                       AttackKind::IdentityForward);
}

/// Keeps the edge state in E and resends |phi_0>: V|a> = |a>_E (x) |phi_0>.
inline AttackSpec keep_and_send_phi0(int edge, std::uint32_t p) {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(p * p, p);
    const double s = 1.0 / std::sqrt(static_cast<double>(p));
    for (std::uint32_t a = 0; a < p; ++a) {
        for (std::uint32_t x = 0; x < p; ++x) {
            v(a * p + x, a) = s;
        }
    }
    return make_attack(edge, p, std::move(v), "keep-phi0", AttackKind::KeepAndSendPhi0);
}

/// Haar-distributed isometry from a seeded complex Gaussian matrix (QR with
/// the R-diagonal phases folded back into Q).
inline AttackSpec random_isometry(int edge, std::uint32_t p, std::uint32_t d_e, std::uint64_t seed) {
    detail::check_edge(edge);
    if (d_e < 1) {
        throw ConfigError("eavesdropper dimension must be >= 1");
    }
    const auto rows = static_cast<Eigen::Index>(d_e * p);
    const auto cols = static_cast<Eigen::Index>(p);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    constexpr int kMaxDraws = 16;
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
        Eigen::MatrixXcd g(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (Eigen::Index i = 0; i < rows; ++i) {
                const double re = gauss(rng);
                const double im = gauss(rng);
                g(i, j) = {re, im};
            }
        }
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
        const Eigen::MatrixXcd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
        bool degenerate = false;
        for (Eigen::Index k = 0; k < cols; ++k) {
            degenerate = degenerate || std::abs(r(k, k)) < 1e-10;
        }
        if (degenerate) {
            continue;
        }
        Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
        for (Eigen::Index k = 0; k < cols; ++k) {
            q.col(k) *= r(k, k) / std::abs(r(k, k));
        }
        return make_attack(edge, p, std::move(q), "random", AttackKind::RandomIsometry, seed);
    }
    throw DomainError("could not draw a non-degenerate Gaussian matrix");
}

enum class MeasureBasis { Z, X };

/// Coherent measure-and-resend: |a> -> sum_k <b_k|a> |k>_E (x) |b_k>.
inline AttackSpec measure_and_resend(int edge, std::uint32_t p, MeasureBasis basis) {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(p * p, p);
    for (std::uint32_t k = 0; k < p; ++k) {
        Eigen::VectorXcd bk = Eigen::VectorXcd::Zero(p);
        if (basis == MeasureBasis::Z) {
            bk(k) = 1.0;
        } else {
            bk = detail::fourier_vector(k, p);
        }
        for (std::uint32_t a = 0; a < p; ++a) {
            const Amplitude overlap = std::conj(bk(a)); // <b_k|a>
            for (std::uint32_t x = 0; x < p; ++x) {
                v(k * p + x, a) += overlap * bk(x);
            }
        }
    }
    const bool z = basis == MeasureBasis::Z;
    return make_attack(edge, p, std::move(v), z ? "measure-z" : "measure-x",
                       z ? AttackKind::MeasureAndResendZ : AttackKind::MeasureAndResendX);
}

/// (I_E (x) <x|) V |a>, a vector on H_E.
inline Eigen::VectorXcd edge_slice(const AttackSpec& attack, std::uint32_t a, std::uint32_t x) {
    const std::uint32_t p = attack.p;
    Eigen::VectorXcd out(attack.d_e);
    for (std::uint32_t e = 0; e < attack.d_e; ++e) {
        out(e) = attack.isometry(e * p + x, a);
    }
    return out;
}

/// Lambda_E(|a><b|) on H_E (x) H_edge.
inline Eigen::MatrixXcd channel_output(const AttackSpec& attack, std::uint32_t a, std::uint32_t b) {
    return attack.isometry.col(a) * attack.isometry.col(b).adjoint();
}

/// lambda(a,b,x,y) = (I_E (x) <x|) Lambda_E(|a><b|) (I_E (x) |y>).
inline Eigen::MatrixXcd lambda_op(const AttackSpec& attack, std::uint32_t a, std::uint32_t b,
                                  std::uint32_t x, std::uint32_t y) {
    const std::uint32_t p = attack.p;
    if (a >= p || b >= p || x >= p || y >= p) {
        throw ConfigError("lambda index out of range");
    }
    return edge_slice(attack, a, x) * edge_slice(attack, b, y).adjoint();
}

/// sigma_b = sum_a lambda(a,a,b,b); positive semidefinite.
inline Eigen::MatrixXcd sigma_b(const AttackSpec& attack, std::uint32_t b) {
    if (b >= attack.p) {
        throw ConfigError("sigma index out of range");
    }
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(attack.d_e, attack.d_e);
    for (std::uint32_t a = 0; a < attack.p; ++a) {
        s += lambda_op(attack, a, a, b, b);
    }
    return s;
}

/// sum_b sigma_b, the partial trace over the edge of Lambda_E(I). Trace p.
inline Eigen::MatrixXcd sigma_sum(const AttackSpec& attack) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(attack.d_e, attack.d_e);
    for (std::uint32_t b = 0; b < attack.p; ++b) {
        s += sigma_b(attack, b);
    }
    return s;
}

} // namespace qnc
