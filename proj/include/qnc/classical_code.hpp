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
 * Secure classical network code on the butterfly network.
 *
 * Edge values Z_i are linear in the source symbols A1, A2 and the source-side
 * shared randomness B1. The code is stored as data (one rule per coded edge,
 * in transmission order) so the same table drives flow evaluation, the
 * coefficient matrices and the quantum encoder.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qnc/ffield.hpp"

namespace qnc {

enum class Channel { Quantum, Classical };

struct Edge {
    int index;
    std::string from;
    std::string to;
    Channel channel;
};

/// e(1)..e(15). Edge numbers are also the transmission order.
inline const std::vector<Edge>& butterfly_edges() {
    static const std::vector<Edge> edges = {
        {1, "I1", "V1", Channel::Quantum},   {2, "I2", "V2", Channel::Quantum},
        {3, "S1", "V1", Channel::Classical}, {4, "S1", "V2", Channel::Classical},
        {5, "V1", "V3", Channel::Quantum},   {6, "V2", "V3", Channel::Quantum},
        {7, "V1", "V5", Channel::Quantum},   {8, "V2", "V6", Channel::Quantum},
        {9, "V3", "V4", Channel::Quantum},   {10, "V4", "V5", Channel::Quantum},
        {11, "V4", "V6", Channel::Quantum},  {12, "V6", "O1", Channel::Quantum},
        {13, "V5", "O2", Channel::Quantum},  {14, "S2", "V5", Channel::Classical},
        {15, "S2", "V6", Channel::Classical},
    };
    return edges;
}

inline constexpr int kFirstAttackableEdge = 5;
inline constexpr int kLastAttackableEdge = 11;

inline bool is_attackable_edge(int j) {
    return j >= kFirstAttackableEdge && j <= kLastAttackableEdge;
}

/// Row order shared by every coefficient matrix: Z1, Z2, Z5, ..., Z13.
inline constexpr std::array<int, 11> kMatrixRows = {1, 2, 5, 6, 7, 8, 9, 10, 11, 12, 13};

/// Small rational coefficient, mapped into F_p as num * den^{-1}.
struct Coefficient {
    std::int64_t num;
    std::int64_t den = 1;

    Fp in(const PrimeField& f) const { return f(num) * f(den).inv(); }
};

/// Z_target := sum_k coeff_k * Z_source_k
struct CodingRule {
    int target;
    std::vector<std::pair<int, Coefficient>> terms;
};

struct ButterflyCode {
    std::vector<CodingRule> rules;

    const CodingRule& rule_for(int target) const {
        for (const auto& r : rules) {
            if (r.target == target) {
                return r;
            }
        }
        throw ConfigError("no coding rule for edge " + std::to_string(target));
    }

    CodingRule& rule_for(int target) {
        return const_cast<CodingRule&>(std::as_const(*this).rule_for(target));
    }
};

inline ButterflyCode standard_butterfly_code() {
    return ButterflyCode{{
        {5, {{1, {2}}, {3, {1}}}},
        {6, {{2, {2}}, {4, {1}}}},
        {7, {{1, {1}}, {3, {1}}}},
        {8, {{2, {1}}, {4, {1}}}},
        {9, {{5, {1}}, {6, {1}}}},
        {10, {{9, {1}}}},
        {11, {{9, {1}}}},
        {12, {{11, {1, 2}}, {8, {-1}}}},
        {13, {{10, {1, 2}}, {7, {-1}}}},
    }};
}

struct FlowAssignment {
    Fp a1;
    Fp a2;
    Fp b1;
    std::array<Fp, 2> b2;
    std::map<int, Fp> z; ///< Z1..Z13; B2 rides on e(14), e(15) as the pair b2.

    Fp at(int i) const { return z.at(i); }
};

namespace detail {

inline void run_rules(const PrimeField& f, const ButterflyCode& code, std::map<int, Fp>& z,
                      std::optional<std::pair<int, Fp>> substitution) {
    for (const auto& rule : code.rules) {
        Fp acc = f.zero();
        for (const auto& [src, c] : rule.terms) {
            acc += c.in(f) * z.at(src);
        }
        z[rule.target] = acc;
        if (substitution && substitution->first == rule.target) {
            z[rule.target] = substitution->second;
        }
    }
}

inline void check_same_field(const PrimeField& f, std::initializer_list<Fp> xs) {
    for (const Fp& x : xs) {
        if (x.modulus() != f.modulus()) {
            throw ConfigError("field element from F_" + std::to_string(x.modulus()) +
                              " used with F_" + std::to_string(f.modulus()));
        }
    }
}

} // namespace detail

inline FlowAssignment evaluate_flow(const PrimeField& f, Fp a1, Fp a2, Fp b1,
                                    const ButterflyCode& code = standard_butterfly_code()) {
    detail::check_same_field(f, {a1, a2, b1});
    FlowAssignment out{a1, a2, b1, {f.zero(), f.zero()}, {}};
    out.z = {{1, a1}, {2, a2}, {3, b1}, {4, b1}};
    detail::run_rules(f, code, out.z, std::nullopt);
    return out;
}

/// Flow when the value on e(attacked_edge) is replaced by e1 on the wire.
inline FlowAssignment evaluate_attacked_flow(const PrimeField& f, int attacked_edge, Fp a1, Fp a2,
                                             Fp b1, Fp e1,
                                             const ButterflyCode& code = standard_butterfly_code()) {
    if (!is_attackable_edge(attacked_edge)) {
        throw ConfigError("attacked edge must be in 5..11, got " + std::to_string(attacked_edge));
    }
    detail::check_same_field(f, {a1, a2, b1, e1});
    FlowAssignment out{a1, a2, b1, {f.zero(), f.zero()}, {}};
    out.z = {{1, a1}, {2, a2}, {3, b1}, {4, b1}};
    detail::run_rules(f, code, out.z, std::make_pair(attacked_edge, e1));
    return out;
}

/// Matrix with rows Z1, Z2, Z5..Z13 (or a subset) over inputs (A1, A2, B1[, E1]).
class CoefficientMatrix {
public:
    CoefficientMatrix(std::vector<int> rows, std::vector<std::string> columns,
                      std::vector<Fp> entries, std::optional<int> attacked_edge)
        : rows_(std::move(rows)),
          columns_(std::move(columns)),
          entries_(std::move(entries)),
          attacked_edge_(attacked_edge) {}

    const std::vector<int>& rows() const { return rows_; }
    const std::vector<std::string>& columns() const { return columns_; }
    std::optional<int> attacked_edge() const { return attacked_edge_; }
    std::size_t num_rows() const { return rows_.size(); }
    std::size_t num_cols() const { return columns_.size(); }

    bool has_row(int edge) const {
        for (int r : rows_) {
            if (r == edge) {
                return true;
            }
        }
        return false;
    }

    Fp at(int edge, std::size_t col) const { return entries_.at(row_pos(edge) * num_cols() + col); }

    std::vector<Fp> row(int edge) const {
        auto first = entries_.begin() + static_cast<std::ptrdiff_t>(row_pos(edge) * num_cols());
        return {first, first + static_cast<std::ptrdiff_t>(num_cols())};
    }

    /// M v, keyed by row edge.
    std::map<int, Fp> apply(std::span<const Fp> inputs) const {
        if (inputs.size() != num_cols()) {
            throw ConfigError("input vector has wrong length");
        }
        std::map<int, Fp> out;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            Fp acc = inputs[0] * entries_[r * num_cols()];
            for (std::size_t c = 1; c < num_cols(); ++c) {
                acc += inputs[c] * entries_[r * num_cols() + c];
            }
            out.emplace(rows_[r], acc);
        }
        return out;
    }

    /// Drops the rows of Z10..Z13 (the registers hidden from the wiretapper).
    CoefficientMatrix reduced() const {
        std::vector<int> rows;
        std::vector<Fp> entries;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (rows_[r] >= 10 && rows_[r] <= 13) {
                continue;
            }
            rows.push_back(rows_[r]);
            for (std::size_t c = 0; c < num_cols(); ++c) {
                entries.push_back(entries_[r * num_cols() + c]);
            }
        }
        return CoefficientMatrix(std::move(rows), columns_, std::move(entries), attacked_edge_);
    }

    const std::vector<Fp>& entries() const { return entries_; }

private:
    std::size_t row_pos(int edge) const {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (rows_[r] == edge) {
                return r;
            }
        }
        throw ConfigError("matrix has no row for Z" + std::to_string(edge));
    }

    std::vector<int> rows_;
    std::vector<std::string> columns_;
    std::vector<Fp> entries_;
    std::optional<int> attacked_edge_;
};

namespace detail {

/// Propagates linear forms over the input symbols through the rules.
inline CoefficientMatrix symbolic_matrix(const PrimeField& f, const ButterflyCode& code,
                                         std::optional<int> attacked_edge) {
    const std::size_t ncols = attacked_edge ? 4 : 3;
    using Form = std::vector<Fp>;
    auto unit = [&](std::size_t k) {
        Form v(ncols, f.zero());
        v[k] = f.one();
        return v;
    };
    std::map<int, Form> forms = {{1, unit(0)}, {2, unit(1)}, {3, unit(2)}, {4, unit(2)}};
    for (const auto& rule : code.rules) {
        Form acc(ncols, f.zero());
        for (const auto& [src, c] : rule.terms) {
            const Fp cf = c.in(f);
            const Form& s = forms.at(src);
            for (std::size_t k = 0; k < ncols; ++k) {
                acc[k] += cf * s[k];
            }
        }
        forms[rule.target] = attacked_edge == rule.target ? unit(3) : acc;
    }
    std::vector<int> rows(kMatrixRows.begin(), kMatrixRows.end());
    std::vector<Fp> entries;
    for (int r : rows) {
        const Form& form = forms.at(r);
        entries.insert(entries.end(), form.begin(), form.end());
    }
    std::vector<std::string> cols = {"A1", "A2", "B1"};
    if (attacked_edge) {
        cols.push_back("E1");
    }
    return CoefficientMatrix(std::move(rows), std::move(cols), std::move(entries), attacked_edge);
}

} // namespace detail

/// Honest matrix M: Z_j = m_j1 A1 + m_j2 A2 + m_j3 B1.
inline CoefficientMatrix coefficient_matrix(const PrimeField& f,
                                            const ButterflyCode& code = standard_butterfly_code()) {
    return detail::symbolic_matrix(f, code, std::nullopt);
}

/// Attacked matrix M': the value on e(attacked_edge) is replaced by E1.
/// Use .reduced() for the matrix without rows 10..13.
inline CoefficientMatrix attacked_coefficient_matrix(
    const PrimeField& f, int attacked_edge, const ButterflyCode& code = standard_butterfly_code()) {
    if (!is_attackable_edge(attacked_edge)) {
        throw ConfigError("attacked edge must be in 5..11, got " + std::to_string(attacked_edge));
    }
    return detail::symbolic_matrix(f, code, attacked_edge);
}

/// (m_j1, m_j2, m_j3) of the honest code.
inline std::array<Fp, 3> edge_coefficients(const PrimeField& f, int edge,
                                           const ButterflyCode& code = standard_butterfly_code()) {
    const auto row = coefficient_matrix(f, code).row(edge);
    return {row[0], row[1], row[2]};
}

struct SecrecyCheckOptions {
    bool randomness_enabled = true; ///< false forces B1 = 0
    ButterflyCode code = standard_butterfly_code();
};

/// Exact I(Z_j ; (A1, A2)) in bits over uniform (A1, A2, B1).
inline double classical_secrecy_check(const PrimeField& f, int edge,
                                      const SecrecyCheckOptions& opts = {}) {
    if (!is_attackable_edge(edge)) {
        throw ConfigError("secrecy check edge must be in 5..11, got " + std::to_string(edge));
    }
    const std::uint32_t p = f.modulus();
    if (p > 13) {
        throw ConfigError("classical secrecy enumeration is limited to p <= 13");
    }
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> joint; // (z, a-index)
    std::map<std::uint32_t, std::uint64_t> z_marg;
    std::map<std::uint32_t, std::uint64_t> a_marg;
    std::uint64_t total = 0;
    const std::vector<Fp> b_values =
        opts.randomness_enabled ? f.elements() : std::vector<Fp>{f.zero()};
    for (Fp a1 : f.elements()) {
        for (Fp a2 : f.elements()) {
            for (Fp b1 : b_values) {
                const std::uint32_t z = evaluate_flow(f, a1, a2, b1, opts.code).at(edge).value();
                const std::uint32_t a = a1.value() * p + a2.value();
                ++joint[{z, a}];
                ++z_marg[z];
                ++a_marg[a];
                ++total;
            }
        }
    }
    double bits = 0.0;
    for (const auto& [key, n] : joint) {
        const std::uint64_t num = n * total;
        const std::uint64_t den = z_marg[key.first] * a_marg[key.second];
        if (num == den) {
            continue; // log2(1) exactly
        }
        bits += static_cast<double>(n) / static_cast<double>(total) *
                std::log2(static_cast<double>(num) / static_cast<double>(den));
    }
    return bits;
}

/// True iff Z12 = A1 and Z13 = A2 for every input in F_p^3.
inline bool recovery_check(const PrimeField& f,
                           const ButterflyCode& code = standard_butterfly_code()) {
    for (Fp a1 : f.elements()) {
        for (Fp a2 : f.elements()) {
            for (Fp b1 : f.elements()) {
                const auto flow = evaluate_flow(f, a1, a2, b1, code);
                if (flow.at(12) != a1 || flow.at(13) != a2) {
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace qnc
