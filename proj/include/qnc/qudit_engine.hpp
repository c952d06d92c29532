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
 * Sparse pure-state simulation over p-dimensional registers plus one
 * eavesdropper register of arbitrary dimension.
 *
 * A state is a map from basis tuples (one index per register, in layout
 * order) to amplitudes. All gates in the protocol are affine permutations
 * or diagonal phases, so the support stays small and the map is exact.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qnc/ffield.hpp"

namespace qnc {

using Amplitude = std::complex<double>;
using Basis = std::vector<std::uint32_t>;

inline constexpr double kPruneThreshold = 1e-14;
inline constexpr double kIsometryTolerance = 1e-10;

enum class Reg : std::uint8_t {
    Ref1,
    Ref2,
    H1,
    H2,
    H5,
    H6,
    H7,
    H8,
    H9,
    H10,
    H11,
    H12,
    H13,
    E,
};

inline std::string_view name(Reg r) {
    static constexpr std::string_view names[] = {"ref1", "ref2", "H1",  "H2",  "H5",
                                                 "H6",   "H7",   "H8",  "H9",  "H10",
                                                 "H11",  "H12",  "H13", "E"};
    return names[static_cast<std::size_t>(r)];
}

/// Register carried by edge e(i), i in {1, 2, 5..13}.
inline Reg wire(int edge) {
    if (edge == 1) {
        return Reg::H1;
    }
    if (edge == 2) {
        return Reg::H2;
    }
    if (edge >= 5 && edge <= 13) {
        return static_cast<Reg>(static_cast<int>(Reg::H5) + (edge - 5));
    }
    throw ConfigError("edge " + std::to_string(edge) + " carries no quantum register");
}

struct Register {
    Reg id;
    std::uint32_t dim;

    friend bool operator==(const Register&, const Register&) = default;
};

/// Ordered registers. Every register except E shares one dimension p.
class RegisterLayout {
public:
    RegisterLayout() = default;
    RegisterLayout(std::initializer_list<Register> regs) {
        for (const auto& r : regs) {
            add(r);
        }
    }
    explicit RegisterLayout(std::span<const Register> regs) {
        for (const auto& r : regs) {
            add(r);
        }
    }

    void add(Register r) {
        if (contains(r.id)) {
            throw ConfigError("duplicate register " + std::string(name(r.id)));
        }
        if (r.dim < 1) {
            throw ConfigError("register dimension must be >= 1");
        }
        if (r.id != Reg::E) {
            if (qudit_dim_ != 0 && r.dim != qudit_dim_) {
                throw ConfigError("register " + std::string(name(r.id)) + " has dimension " +
                                  std::to_string(r.dim) + ", layout uses " +
                                  std::to_string(qudit_dim_));
            }
            qudit_dim_ = r.dim;
        }
        regs_.push_back(r);
    }

    void remove(Reg id) {
        regs_.erase(regs_.begin() + static_cast<std::ptrdiff_t>(index_of(id)));
    }

    bool contains(Reg id) const {
        return std::any_of(regs_.begin(), regs_.end(), [&](const Register& r) { return r.id == id; });
    }

    std::size_t index_of(Reg id) const {
        for (std::size_t i = 0; i < regs_.size(); ++i) {
            if (regs_[i].id == id) {
                return i;
            }
        }
        throw ConfigError("unknown register " + std::string(name(id)));
    }

    std::uint32_t dim(Reg id) const { return regs_[index_of(id)].dim; }
    std::uint32_t qudit_dim() const { return qudit_dim_; }
    std::size_t size() const { return regs_.size(); }
    const std::vector<Register>& registers() const { return regs_; }
    const Register& operator[](std::size_t i) const { return regs_[i]; }

    std::size_t total_dim() const {
        std::size_t d = 1;
        for (const auto& r : regs_) {
            d *= r.dim;
        }
        return d;
    }

    /// Row-major mixed-radix index; the first register is most significant.
    std::size_t dense_index(std::span<const std::uint32_t> t) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < regs_.size(); ++i) {
            idx = idx * regs_[i].dim + t[i];
        }
        return idx;
    }

    Basis basis_of(std::size_t idx) const {
        Basis t(regs_.size());
        for (std::size_t i = regs_.size(); i-- > 0;) {
            t[i] = static_cast<std::uint32_t>(idx % regs_[i].dim);
            idx /= regs_[i].dim;
        }
        return t;
    }

    friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;

private:
    std::vector<Register> regs_;
    std::uint32_t qudit_dim_ = 0;
};

/// omega^k with omega = exp(2 pi i / p), k reduced mod p.
inline Amplitude omega_pow(std::int64_t k, std::uint32_t p) {
    const std::int64_t r = ((k % static_cast<std::int64_t>(p)) + p) % p;
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / p);
}

inline std::vector<Amplitude> omega_table(std::uint32_t p) {
    std::vector<Amplitude> w(p);
    for (std::uint32_t k = 0; k < p; ++k) {
        w[k] = omega_pow(k, p);
    }
    return w;
}

class SparseState {
public:
    using Map = std::map<Basis, Amplitude>;

    SparseState() = default;
    SparseState(RegisterLayout layout, Map amps) : layout_(std::move(layout)), amps_(std::move(amps)) {
        for (const auto& [t, a] : amps_) {
            check_tuple(t);
        }
        prune();
    }

    static SparseState basis_state(RegisterLayout layout, Basis t) {
        Map m;
        m.emplace(std::move(t), Amplitude{1.0, 0.0});
        return SparseState(std::move(layout), std::move(m));
    }

    /// Single-register state from a dense vector.
    static SparseState from_vector(Register reg, std::span<const Amplitude> psi) {
        if (psi.size() != reg.dim) {
            throw ConfigError("vector length does not match register dimension");
        }
        Map m;
        for (std::uint32_t a = 0; a < reg.dim; ++a) {
            m.emplace(Basis{a}, psi[a]);
        }
        return SparseState(RegisterLayout{reg}, std::move(m));
    }

    const RegisterLayout& layout() const { return layout_; }
    const Map& amplitudes() const { return amps_; }
    std::size_t support_size() const { return amps_.size(); }

    Amplitude amplitude(const Basis& t) const {
        auto it = amps_.find(t);
        return it == amps_.end() ? Amplitude{} : it->second;
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& [t, a] : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    void normalize() {
        const double n = std::sqrt(norm_squared());
        if (n == 0.0) {
            throw DomainError("cannot normalize the zero vector");
        }
        for (auto& [t, a] : amps_) {
            a /= n;
        }
        prune();
    }

    void prune(double threshold = kPruneThreshold) {
        std::erase_if(amps_, [&](const auto& kv) { return std::abs(kv.second) < threshold; });
    }

    /// |this> (x) |other>; other's registers are appended.
    SparseState tensor(const SparseState& other) const {
        RegisterLayout layout = layout_;
        for (const auto& r : other.layout_.registers()) {
            layout.add(r);
        }
        Map m;
        for (const auto& [t1, a1] : amps_) {
            for (const auto& [t2, a2] : other.amps_) {
                Basis t = t1;
                t.insert(t.end(), t2.begin(), t2.end());
                m.emplace(std::move(t), a1 * a2);
            }
        }
        return SparseState(std::move(layout), std::move(m));
    }

    /// Same state with registers permuted into `order`.
    SparseState reordered(const RegisterLayout& order) const {
        if (order.size() != layout_.size()) {
            throw ConfigError("reorder target has a different register set");
        }
        std::vector<std::size_t> src(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            src[i] = layout_.index_of(order[i].id);
            if (layout_[src[i]].dim != order[i].dim) {
                throw ConfigError("reorder target changes a register dimension");
            }
        }
        Map m;
        for (const auto& [t, a] : amps_) {
            Basis u(order.size());
            for (std::size_t i = 0; i < order.size(); ++i) {
                u[i] = t[src[i]];
            }
            m.emplace(std::move(u), a);
        }
        return SparseState(order, std::move(m));
    }

    Eigen::VectorXcd to_dense() const {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout_.total_dim()));
        for (const auto& [t, a] : amps_) {
            v(static_cast<Eigen::Index>(layout_.dense_index(t))) = a;
        }
        return v;
    }

private:
    void check_tuple(const Basis& t) const {
        if (t.size() != layout_.size()) {
            throw ConfigError("basis tuple length does not match layout");
        }
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] >= layout_[i].dim) {
                throw ConfigError("basis index out of range for register " +
                                  std::string(name(layout_[i].id)));
            }
        }
    }

    RegisterLayout layout_;
    Map amps_;
};

struct AffineControl {
    Reg reg;
    Fp coeff;
};

namespace detail {

inline void check_qudit(const RegisterLayout& layout, Reg r, std::uint32_t p) {
    if (r == Reg::E || layout.dim(r) != p) {
        throw ConfigError("register " + std::string(name(r)) + " is not a dimension-" +
                          std::to_string(p) + " qudit");
    }
}

} // namespace detail

/// t[target] += sum coeff * t[control] + constant (mod p). A permutation of
/// basis tuples, hence unitary.
inline SparseState apply_affine_adder(const SparseState& state, Reg target,
                                      std::span<const AffineControl> controls, Fp constant) {
    const auto& layout = state.layout();
    const std::uint32_t p = constant.modulus();
    detail::check_qudit(layout, target, p);
    const std::size_t ti = layout.index_of(target);
    std::vector<std::pair<std::size_t, std::uint64_t>> ctl;
    for (const auto& c : controls) {
        if (c.reg == target) {
            throw ConfigError("adder target " + std::string(name(target)) + " is also a control");
        }
        if (c.coeff.modulus() != p) {
            throw ConfigError("adder coefficients from different fields");
        }
        detail::check_qudit(layout, c.reg, p);
        ctl.emplace_back(layout.index_of(c.reg), c.coeff.value());
    }
    SparseState::Map out;
    for (const auto& [t, a] : state.amplitudes()) {
        Basis u = t;
        std::uint64_t v = std::uint64_t{t[ti]} + constant.value();
        for (const auto& [ci, k] : ctl) {
            v += k * t[ci];
        }
        u[ti] = static_cast<std::uint32_t>(v % p);
        out.emplace(std::move(u), a);
    }
    return SparseState(layout, std::move(out));
}

inline SparseState apply_affine_adder(const SparseState& state, Reg target,
                                      std::initializer_list<AffineControl> controls, Fp constant) {
    return apply_affine_adder(state, target, std::span<const AffineControl>(controls.begin(), controls.size()),
                              constant);
}

/// Applies X^k where X = sum_a omega^a |a><a|.
inline SparseState apply_phase_power(const SparseState& state, Reg reg, std::int64_t k) {
    const auto& layout = state.layout();
    const std::uint32_t p = layout.qudit_dim();
    detail::check_qudit(layout, reg, p);
    const std::size_t ri = layout.index_of(reg);
    const auto w = omega_table(p);
    const std::int64_t kr = ((k % static_cast<std::int64_t>(p)) + p) % p;
    SparseState::Map out;
    for (const auto& [t, a] : state.amplitudes()) {
        out.emplace(t, a * w[static_cast<std::size_t>((kr * t[ri]) % p)]);
    }
    return SparseState(layout, std::move(out));
}

/// True when V^dagger V = I within tolerance.
inline bool is_isometry(const Eigen::MatrixXcd& v, double tol = kIsometryTolerance) {
    const Eigen::MatrixXcd g = v.adjoint() * v;
    return (g - Eigen::MatrixXcd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() <= tol;
}

/// Applies V: H_reg -> H_E (x) H_reg. Rows of V are indexed e * p + x, so
/// V(e * p + x, a) = (<e|_E (x) <x|) V |a>. Register E is appended.
inline SparseState apply_isometry(const SparseState& state, Reg reg, const Eigen::MatrixXcd& v) {
    const auto& layout = state.layout();
    const std::uint32_t p = layout.qudit_dim();
    detail::check_qudit(layout, reg, p);
    if (layout.contains(Reg::E)) {
        throw ConfigError("register E is already attached");
    }
    if (v.cols() != static_cast<Eigen::Index>(p) || v.rows() % p != 0 || v.rows() == 0) {
        throw ConfigError("isometry must have shape (d_E * p) x p");
    }
    if (!is_isometry(v)) {
        throw ConfigError("matrix is not an isometry (V^dagger V != I)");
    }
    const auto d_e = static_cast<std::uint32_t>(v.rows() / p);
    RegisterLayout out_layout = layout;
    out_layout.add({Reg::E, d_e});
    const std::size_t ri = layout.index_of(reg);
    SparseState::Map out;
    for (const auto& [t, a] : state.amplitudes()) {
        for (std::uint32_t e = 0; e < d_e; ++e) {
            for (std::uint32_t x = 0; x < p; ++x) {
                const Amplitude c = v(e * p + x, t[ri]);
                if (std::abs(c) == 0.0) {
                    continue;
                }
                Basis u = t;
                u[ri] = x;
                u.push_back(e);
                out[u] += a * c;
            }
        }
    }
    return SparseState(std::move(out_layout), std::move(out));
}

/// How outcome labels map onto the Fourier basis phi_b = p^{-1/2} sum_a omega^{ab} |a>.
enum class XLabel {
    Phi,       ///< outcome k projects onto |phi_k>
    Conjugate, ///< outcome k projects onto |phi_{-k}>, i.e. <phi_{-k}|a> = omega^{+ka} / sqrt(p)
};

struct Sample {
    std::mt19937_64* rng;
};

struct Branch {
    std::uint32_t outcome;
    bool allow_zero_probability = false;
};

using MeasureMode = std::variant<Sample, Branch>;

struct Measurement {
    std::uint32_t outcome = 0;
    double probability = 0.0;
    bool zero_probability = false;
    SparseState state; ///< renormalized (unless zero probability), register removed
};

/// Uniform double in [0, 1) from the top 53 bits, independent of the
/// standard library's distribution implementation.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace detail {

/// Unnormalized projections for each outcome in `outcomes`.
inline std::vector<SparseState> x_projections(const SparseState& state, Reg reg, XLabel label,
                                              std::span<const std::uint32_t> outcomes) {
    const auto& layout = state.layout();
    const std::uint32_t p = layout.qudit_dim();
    detail::check_qudit(layout, reg, p);
    const std::size_t ri = layout.index_of(reg);
    RegisterLayout rest = layout;
    rest.remove(reg);
    const auto w = omega_table(p);
    const double scale = 1.0 / std::sqrt(static_cast<double>(p));
    const std::int64_t sign = label == XLabel::Phi ? -1 : 1;

    std::map<Basis, std::vector<std::pair<std::uint32_t, Amplitude>>> groups;
    for (const auto& [t, a] : state.amplitudes()) {
        Basis u = t;
        u.erase(u.begin() + static_cast<std::ptrdiff_t>(ri));
        groups[std::move(u)].emplace_back(t[ri], a);
    }
    std::vector<SparseState> out;
    out.reserve(outcomes.size());
    for (std::uint32_t k : outcomes) {
        SparseState::Map m;
        for (const auto& [u, entries] : groups) {
            Amplitude acc{};
            for (const auto& [z, a] : entries) {
                const std::int64_t ex = (sign * static_cast<std::int64_t>(k) * z) % p;
                acc += a * w[static_cast<std::size_t>((ex + p) % p)];
            }
            acc *= scale;
            if (std::abs(acc) >= kPruneThreshold) {
                m.emplace(u, acc);
            }
        }
        out.emplace_back(rest, std::move(m));
    }
    return out;
}

} // namespace detail

/// All p outcomes of an X-basis measurement: (probability, collapsed state).
inline std::vector<Measurement> x_basis_branches(const SparseState& state, Reg reg,
                                                 XLabel label = XLabel::Phi) {
    const std::uint32_t p = state.layout().qudit_dim();
    std::vector<std::uint32_t> ks(p);
    for (std::uint32_t k = 0; k < p; ++k) {
        ks[k] = k;
    }
    auto proj = detail::x_projections(state, reg, label, ks);
    std::vector<Measurement> out;
    out.reserve(p);
    for (std::uint32_t k = 0; k < p; ++k) {
        Measurement m;
        m.outcome = k;
        m.probability = proj[k].norm_squared();
        m.zero_probability = m.probability < kPruneThreshold * kPruneThreshold;
        m.state = std::move(proj[k]);
        if (!m.zero_probability) {
            m.state.normalize();
        }
        out.push_back(std::move(m));
    }
    return out;
}

inline Measurement measure_x_basis(const SparseState& state, Reg reg, MeasureMode mode,
                                   XLabel label = XLabel::Phi) {
    if (const auto* b = std::get_if<Branch>(&mode)) {
        if (b->outcome >= state.layout().qudit_dim()) {
            throw ConfigError("measurement outcome out of range");
        }
        const std::uint32_t k = b->outcome;
        auto proj = detail::x_projections(state, reg, label, std::span<const std::uint32_t>(&k, 1));
        Measurement m;
        m.outcome = k;
        m.probability = proj[0].norm_squared();
        m.zero_probability = m.probability < kPruneThreshold * kPruneThreshold;
        if (m.zero_probability && !b->allow_zero_probability) {
            throw DomainError("requested measurement branch has zero probability");
        }
        m.state = std::move(proj[0]);
        if (!m.zero_probability) {
            m.state.normalize();
        }
        return m;
    }
    auto& rng = *std::get<Sample>(mode).rng;
    auto branches = x_basis_branches(state, reg, label);
    const double u = uniform01(rng);
    double cum = 0.0;
    std::size_t pick = branches.size();
    for (std::size_t k = 0; k < branches.size(); ++k) {
        if (branches[k].zero_probability) {
            continue;
        }
        pick = k;
        cum += branches[k].probability;
        if (u < cum) {
            break;
        }
    }
    if (pick == branches.size()) {
        throw DomainError("cannot sample a measurement of the zero vector");
    }
    return std::move(branches[pick]);
}

/// Exact overlap-based fidelity <target| rho |target> where rho is the
/// reduction of `state` onto target's registers. Phase-free.
inline double fidelity_with_pure(const SparseState& state, const SparseState& target) {
    const auto& tl = target.layout();
    const auto& sl = state.layout();
    std::vector<std::size_t> kept;
    for (const auto& r : tl.registers()) {
        kept.push_back(sl.index_of(r.id));
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < sl.size(); ++i) {
        if (std::find(kept.begin(), kept.end(), i) == kept.end()) {
            rest.push_back(i);
        }
    }
    std::map<Basis, Amplitude> overlaps; // keyed by the traced-out tuple
    for (const auto& [t, a] : state.amplitudes()) {
        Basis k(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i) {
            k[i] = t[kept[i]];
        }
        const Amplitude c = target.amplitude(k);
        if (c == Amplitude{}) {
            continue;
        }
        Basis r(rest.size());
        for (std::size_t i = 0; i < rest.size(); ++i) {
            r[i] = t[rest[i]];
        }
        overlaps[r] += std::conj(c) * a;
    }
    double f = 0.0;
    for (const auto& [r, o] : overlaps) {
        f += std::norm(o);
    }
    return f;
}

} // namespace qnc
