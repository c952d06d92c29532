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

#include "qnc/adversary.hpp"

#include <gtest/gtest.h>

using namespace qnc;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST(adversary, constructors_produce_isometries) {
    for (std::uint32_t p : {3u, 5u}) {
        for (int edge = 5; edge <= 11; ++edge) {
            EXPECT_TRUE(is_isometry(identity_forward(edge, p).isometry));
            EXPECT_TRUE(is_isometry(keep_and_send_phi0(edge, p).isometry));
            EXPECT_TRUE(is_isometry(measure_and_resend(edge, p, MeasureBasis::Z).isometry));
            EXPECT_TRUE(is_isometry(measure_and_resend(edge, p, MeasureBasis::X).isometry));
            for (std::uint32_t d : {1u, 2u, 3u, 9u}) {
                const auto a = random_isometry(edge, p, d, 100 + d);
                EXPECT_TRUE(is_isometry(a.isometry, 1e-12));
                EXPECT_EQ(a.d_e, d);
                EXPECT_EQ(a.isometry.rows(), static_cast<Eigen::Index>(d * p));
            }
        }
    }
}

TEST(adversary, rejects_bad_edges_and_matrices) {
    EXPECT_THROW(identity_forward(4, 3), ConfigError);
    EXPECT_THROW(random_isometry(12, 3, 3, 1), ConfigError);
    EXPECT_THROW(random_isometry(7, 3, 0, 1), ConfigError);
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(3, 3);
    v(0, 1) = 0.5;
    EXPECT_THROW(make_attack(7, 3, v, "bad"), ConfigError);
    EXPECT_THROW(make_attack(7, 3, Eigen::MatrixXcd::Identity(5, 3), "bad"), ConfigError);
}

TEST(adversary, unit_eve_dimension_is_unitary) {
    const auto a = random_isometry(8, 5, 1, 42);
    EXPECT_LT(max_abs(a.isometry * a.isometry.adjoint() - Eigen::MatrixXcd::Identity(5, 5)), 1e-12);
}

TEST(adversary, seeds_are_deterministic_and_distinct) {
    const auto a = random_isometry(7, 3, 3, 5);
    const auto b = random_isometry(7, 3, 3, 5);
    const auto c = random_isometry(7, 3, 3, 6);
    EXPECT_EQ(max_abs(a.isometry - b.isometry), 0.0);
    EXPECT_GT(max_abs(a.isometry - c.isometry), 1e-3);
    EXPECT_EQ(*a.seed, 5u);
}

// Lambda_E(|a><b|) = sum_{x,y} lambda(a,b,x,y) (x) |x><y|
TEST(adversary, lambda_reconstructs_channel_output) {
    const std::uint32_t p = 3;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto att = random_isometry(9, p, 2, seed);
        for (std::uint32_t a = 0; a < p; ++a) {
            for (std::uint32_t b = 0; b < p; ++b) {
                Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(att.d_e * p, att.d_e * p);
                for (std::uint32_t x = 0; x < p; ++x) {
                    for (std::uint32_t y = 0; y < p; ++y) {
                        const auto l = lambda_op(att, a, b, x, y);
                        for (std::uint32_t e = 0; e < att.d_e; ++e) {
                            for (std::uint32_t f = 0; f < att.d_e; ++f) {
                                rebuilt(e * p + x, f * p + y) += l(e, f);
                            }
                        }
                    }
                }
                EXPECT_LT(max_abs(rebuilt - channel_output(att, a, b)), 1e-14);
            }
        }
    }
}

TEST(adversary, keep_phi0_lambda) {
    const std::uint32_t p = 3;
    const auto att = keep_and_send_phi0(10, p);
    for (std::uint32_t a = 0; a < p; ++a) {
        for (std::uint32_t b = 0; b < p; ++b) {
            Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(p, p);
            expect(a, b) = 1.0 / p;
            for (std::uint32_t x = 0; x < p; ++x) {
                for (std::uint32_t y = 0; y < p; ++y) {
                    EXPECT_LT(max_abs(lambda_op(att, a, b, x, y) - expect), 1e-15);
                }
            }
        }
    }
    for (std::uint32_t b = 0; b < p; ++b) {
        EXPECT_LT(max_abs(sigma_b(att, b) - Eigen::MatrixXcd::Identity(p, p) / 3.0), 1e-15);
    }
    EXPECT_THROW(lambda_op(att, 3, 0, 0, 0), ConfigError);
    EXPECT_THROW(sigma_b(att, 3), ConfigError);
}

TEST(adversary, identity_sigma_is_one) {
    const auto att = identity_forward(5, 5);
    for (std::uint32_t b = 0; b < 5; ++b) {
        EXPECT_EQ(sigma_b(att, b).rows(), 1);
        EXPECT_NEAR(std::abs(sigma_b(att, b)(0, 0) - 1.0), 0.0, 1e-15);
    }
}

TEST(adversary, sigma_positive_with_trace_p) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::uint32_t p = seed % 2 ? 3 : 5;
        const auto att = random_isometry(5 + static_cast<int>(seed % 7), p, 1 + seed % 4, seed);
        for (std::uint32_t b = 0; b < p; ++b) {
            const Eigen::MatrixXcd s = sigma_b(att, b);
            EXPECT_LT(max_abs(s - s.adjoint()), 1e-13);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s);
            EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12) << seed;
        }
        EXPECT_NEAR(sigma_sum(att).trace().real(), static_cast<double>(p), 1e-12);
    }
}

TEST(adversary, measure_resend_on_basis_inputs) {
    const std::uint32_t p = 3;
    const auto z = measure_and_resend(6, p, MeasureBasis::Z);
    // |a> -> |a>_E |a>
    for (std::uint32_t a = 0; a < p; ++a) {
        EXPECT_NEAR(std::abs(z.isometry(a * p + a, a) - 1.0), 0.0, 1e-15);
    }
    // X-basis version on |0>: uniform superposition over k of |k>_E |phi_k> / sqrt p
    const auto x = measure_and_resend(6, p, MeasureBasis::X);
    for (std::uint32_t k = 0; k < p; ++k) {
        const Eigen::VectorXcd phi = detail::fourier_vector(k, p) / std::sqrt(3.0);
        for (std::uint32_t y = 0; y < p; ++y) {
            EXPECT_NEAR(std::abs(x.isometry(k * p + y, 0) - phi(y)), 0.0, 1e-15);
        }
    }
}
