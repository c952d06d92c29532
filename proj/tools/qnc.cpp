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

// qnc: command-line driver.
//
//   qnc honest    --p 3 --trials 100
//   qnc attack    --p 3 --edge 7 --attack random --d-e 9 --expect secure
//   qnc sweep     --p 3 --attacks-per-edge 20 --canonical
//   qnc classical --p 5
//
// Exit codes: 0 ok, 1 verdict mismatch, 2 usage error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "qnc/qnc.hpp"

namespace {

using namespace qnc;

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    bool no_timestamp = false;
    unsigned jobs = 0;
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void stamp(json& j, const Common& c) {
    if (!c.no_timestamp) {
        j["timestamp"] = utc_timestamp();
    }
}

void emit(const std::string& text, const Common& c) {
    if (c.out.empty() || c.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot open output file " + c.out);
    }
    f << text;
}

/// Runs fn(0..n-1) on up to `jobs` threads. Results land by index, so
/// output order never depends on scheduling.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs == 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!err) {
                    err = std::current_exception();
                }
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (err) {
        std::rethrow_exception(err);
    }
}

void add_common(CLI::App* app, Common& c, bool csv) {
    app->add_option("--seed", c.seed, "base seed (falls back to $QNC_SEED)")->envname("QNC_SEED");
    app->add_option("--out", c.out, "output path, '-' for stdout");
    if (csv) {
        app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    }
    app->add_flag("--no-timestamp", c.no_timestamp, "omit the timestamp field");
    app->add_option("--jobs", c.jobs, "worker threads (0 = all cores)");
}

PadVariant parse_variant(const std::string& s) {
    return s == "weak-pad" ? PadVariant::WeakPadC11Only : PadVariant::FullPad;
}

// ---- honest ---------------------------------------------------------------

struct HonestArgs {
    std::uint32_t p = 3;
    std::optional<std::int64_t> b1;
    std::size_t trials = 1;
    double tol = 1e-10;
};

struct HonestTrial {
    std::uint32_t b1 = 0;
    std::array<std::uint32_t, 2> b2{};
    std::uint64_t seed = 0;
    RunResult result;
    bool b2_independent = false;
};

int cmd_honest(const HonestArgs& a, const Common& c) {
    const PrimeField f(a.p);
    std::vector<HonestTrial> trials(a.trials);
    parallel_for(a.trials, c.jobs, [&](std::size_t i) {
        HonestTrial& t = trials[i];
        t.seed = c.seed + i;
        std::mt19937_64 keys(t.seed ^ 0x9e3779b97f4a7c15ULL);
        t.b1 = a.b1 ? f(*a.b1).value() : static_cast<std::uint32_t>(keys() % a.p);
        t.b2 = {static_cast<std::uint32_t>(keys() % a.p), static_cast<std::uint32_t>(keys() % a.p)};
        auto cfg = ProtocolConfig::make(a.p, t.b1, {t.b2[0], t.b2[1]}, t.seed);
        t.result = run(cfg);
        // same seed, different pad key: the quantum output must not move
        auto other = ProtocolConfig::make(a.p, t.b1, {t.b2[0] + 1, t.b2[1] + 2}, t.seed);
        const RunResult r2 = run(other);
        const Eigen::VectorXcd d1 = t.result.final_state.to_dense();
        const Eigen::VectorXcd d2 = r2.final_state.reordered(t.result.final_state.layout()).to_dense();
        t.b2_independent = r2.transcript.outcomes == t.result.transcript.outcomes &&
                           (d1 - d2).cwiseAbs().maxCoeff() <= a.tol;
    });

    bool all_ok = true;
    for (const auto& t : trials) {
        all_ok = all_ok && t.result.fidelity && std::abs(*t.result.fidelity - 1.0) <= a.tol && t.b2_independent;
    }
    if (c.format == "csv") {
        std::ostringstream os;
        os << "trial,seed,b1,b2_0,b2_1,fidelity,b2_independent\n";
        for (std::size_t i = 0; i < trials.size(); ++i) {
            const auto& t = trials[i];
            os << i << ',' << t.seed << ',' << t.b1 << ',' << t.b2[0] << ',' << t.b2[1] << ','
               << format12(*t.result.fidelity) << ',' << (t.b2_independent ? "true" : "false") << '\n';
        }
        emit(os.str(), c);
    } else {
        json runs = json::array();
        for (const auto& t : trials) {
            auto cfg = ProtocolConfig::make(a.p, t.b1, {t.b2[0], t.b2[1]}, t.seed);
            json j = to_json(t.result, cfg);
            j["b2_independent"] = t.b2_independent;
            runs.push_back(std::move(j));
        }
        json out = {{"command", "honest"}, {"p", a.p},       {"seed", c.seed},  {"trials", a.trials},
                    {"tolerance", a.tol},  {"all_pass", all_ok}, {"runs", runs}};
        stamp(out, c);
        emit(out.dump(2) + "\n", c);
    }
    return all_ok ? kExitOk : kExitMismatch;
}

// ---- attack ---------------------------------------------------------------

struct AttackArgs {
    std::uint32_t p = 3;
    int edge = 7;
    std::string kind = "random";
    std::optional<std::uint32_t> d_e;
    std::string variant = "full-pad";
    double tol = 1e-9;
    std::string expect;
    bool sample = false;
    std::size_t samples = 512;
    bool fidelity = false;
};

AttackSpec build_attack(const std::string& kind, int edge, std::uint32_t p, std::uint32_t d_e,
                        std::uint64_t seed) {
    if (kind == "keep-phi0") {
        return keep_and_send_phi0(edge, p);
    }
    if (kind == "measure-z") {
        return measure_and_resend(edge, p, MeasureBasis::Z);
    }
    if (kind == "measure-x") {
        return measure_and_resend(edge, p, MeasureBasis::X);
    }
    if (kind == "identity") {
        return identity_forward(edge, p);
    }
    return random_isometry(edge, p, d_e, seed);
}

int cmd_attack(const AttackArgs& a, const Common& c) {
    auto cfg = ProtocolConfig::make(a.p, 0, {0, 0}, c.seed);
    cfg.attack = build_attack(a.kind, a.edge, a.p, a.d_e.value_or(a.p * a.p), c.seed);
    cfg.variant = parse_variant(a.variant);
    SecurityOptions opts;
    opts.allow_sampling = a.sample;
    opts.samples = a.samples;
    opts.sample_seed = c.seed;
    opts.with_fidelity = a.fidelity;
    const SecurityReport rep = analyze(cfg, opts);
    const IndependenceVerdict v = verify_independence(rep, a.tol);

    if (c.format == "csv") {
        emit(csv_header() + "\n" + csv_row(rep, v) + "\n", c);
    } else {
        json out = to_json(rep, v);
        out["command"] = "attack";
        out["seed"] = c.seed;
        out["tolerance"] = a.tol;
        out["expect"] = a.expect.empty() ? json(nullptr) : json(a.expect);
        stamp(out, c);
        emit(out.dump(2) + "\n", c);
    }
    std::cerr << "edge " << a.edge << ' ' << rep.attack.label << ' ' << variant_name(rep.variant)
              << ": " << (v.independent ? "secure" : "insecure") << " (worst deviation "
              << format12(v.worst_deviation) << ")\n";
    if (a.expect.empty()) {
        return kExitOk;
    }
    return v.independent == (a.expect == "secure") ? kExitOk : kExitMismatch;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
    std::uint32_t p = 3;
    std::size_t per_edge = 20;
    std::string variant = "full-pad";
    std::vector<std::uint32_t> d_e;
    std::vector<int> edges;
    bool canonical = false;
    bool sample = false;
    std::size_t samples = 512;
    double tol = 1e-9;
    std::string expect;
};

int cmd_sweep(const SweepArgs& a, const Common& c) {
    std::vector<std::uint32_t> dims = a.d_e;
    if (dims.empty()) {
        dims = {1, a.p, a.p * a.p};
    }
    std::vector<int> edges = a.edges;
    if (edges.empty()) {
        for (int e = kFirstAttackableEdge; e <= kLastAttackableEdge; ++e) {
            edges.push_back(e);
        }
    }
    std::vector<AttackSpec> attacks;
    for (int edge : edges) {
        for (std::size_t i = 0; i < a.per_edge; ++i) {
            const std::uint64_t seed = c.seed * 1000003ULL + static_cast<std::uint64_t>(edge) * 10007ULL + i;
            attacks.push_back(random_isometry(edge, a.p, dims[i % dims.size()], seed));
        }
        if (a.canonical) {
            attacks.push_back(keep_and_send_phi0(edge, a.p));
            attacks.push_back(measure_and_resend(edge, a.p, MeasureBasis::Z));
            attacks.push_back(measure_and_resend(edge, a.p, MeasureBasis::X));
        }
    }
    std::vector<std::optional<std::pair<SecurityReport, IndependenceVerdict>>> results(attacks.size());
    SecurityOptions opts;
    opts.allow_sampling = a.sample;
    opts.samples = a.samples;
    opts.sample_seed = c.seed;
    parallel_for(attacks.size(), c.jobs, [&](std::size_t i) {
        auto cfg = ProtocolConfig::make(a.p, 0, {0, 0}, c.seed);
        cfg.attack = attacks[i];
        cfg.variant = parse_variant(a.variant);
        SecurityReport rep = analyze(cfg, opts);
        rep.per_branch.shrink_to_fit();
        const auto v = verify_independence(rep, a.tol);
        results[i].emplace(std::move(rep), v);
    });

    std::ostringstream os;
    os << csv_header() << '\n';
    std::map<int, std::tuple<std::size_t, double, std::size_t>> summary; // rows, max dev, insecure
    bool mismatch = false;
    for (const auto& r : results) {
        const auto& [rep, v] = *r;
        os << csv_row(rep, v) << '\n';
        auto& [rows, worst, insecure] = summary[rep.attack.edge];
        ++rows;
        worst = std::max(worst, rep.product_deviation);
        insecure += v.independent ? 0 : 1;
        if (!a.expect.empty() && v.independent != (a.expect == "secure")) {
            mismatch = true;
        }
    }
    emit(os.str(), c);
    for (const auto& [edge, s] : summary) {
        std::cerr << "edge " << edge << ": rows " << std::get<0>(s) << ", max product_deviation "
                  << format12(std::get<1>(s)) << ", insecure " << std::get<2>(s) << '\n';
    }
    return mismatch ? kExitMismatch : kExitOk;
}

// ---- classical ------------------------------------------------------------

int cmd_classical(std::uint32_t p, const Common& c) {
    const PrimeField f(p);
    const bool recovery = recovery_check(f);
    json secrecy = json::array();
    bool all_zero = true;
    json attacked = json::object();
    for (int j = kFirstAttackableEdge; j <= kLastAttackableEdge; ++j) {
        json row = {{"edge", j}, {"m_j3", coefficient_matrix(f).at(j, 2).value()}};
        if (p <= 13) {
            const double mi = classical_secrecy_check(f, j);
            all_zero = all_zero && mi == 0.0;
            row["mutual_information_bits"] = round12(mi);
        } else {
            row["mutual_information_bits"] = nullptr;
        }
        secrecy.push_back(std::move(row));
        attacked[std::to_string(j)] = to_json(attacked_coefficient_matrix(f, j));
    }
    json out = {{"command", "classical"},
                {"p", p},
                {"recovery", recovery},
                {"secrecy", secrecy},
                {"M", to_json(coefficient_matrix(f))},
                {"M_attacked", attacked}};
    stamp(out, c);
    emit(out.dump(2) + "\n", c);
    return recovery && all_zero ? kExitOk : kExitMismatch;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secure quantum network coding on the butterfly network"};
    app.require_subcommand(1);

    Common common;

    HonestArgs honest;
    auto* h = app.add_subcommand("honest", "run the honest protocol and check output fidelity");
    h->add_option("--p", honest.p, "odd prime field size");
    h->add_option("--b1", honest.b1, "shared randomness B1 (random per trial if omitted)");
    h->add_option("--trials", honest.trials, "number of seeded runs")->check(CLI::PositiveNumber);
    h->add_option("--tol", honest.tol, "fidelity tolerance");
    add_common(h, common, true);

    AttackArgs attack;
    auto* at = app.add_subcommand("attack", "security analysis of one wiretap attack");
    at->add_option("--p", attack.p, "odd prime field size");
    at->add_option("--edge", attack.edge, "attacked edge")->check(CLI::Range(5, 11));
    at->add_option("--attack", attack.kind, "attack kind")
        ->check(CLI::IsMember({"random", "keep-phi0", "measure-z", "measure-x", "identity"}));
    at->add_option("--d-e", attack.d_e, "eavesdropper dimension for random attacks (default p^2)")
        ->check(CLI::PositiveNumber);
    at->add_option("--variant", attack.variant, "pad variant")->check(CLI::IsMember({"full-pad", "weak-pad"}));
    at->add_option("--tol", attack.tol, "independence tolerance");
    at->add_option("--expect", attack.expect, "expected verdict")->check(CLI::IsMember({"secure", "insecure"}));
    at->add_flag("--sample", attack.sample, "sample records when enumeration exceeds the cap");
    at->add_option("--samples", attack.samples, "number of sampled records")->check(CLI::PositiveNumber);
    at->add_flag("--fidelity", attack.fidelity, "also report the attacked output fidelity");
    add_common(at, common, true);

    SweepArgs sweep;
    auto* sw = app.add_subcommand("sweep", "random attacks on every edge 5..11, CSV output");
    sw->add_option("--p", sweep.p, "odd prime field size");
    sw->add_option("--attacks-per-edge", sweep.per_edge, "random attacks per edge");
    sw->add_option("--variant", sweep.variant, "pad variant")->check(CLI::IsMember({"full-pad", "weak-pad"}));
    sw->add_option("--d-e", sweep.d_e, "eavesdropper dimensions to cycle through")->delimiter(',');
    sw->add_option("--edges", sweep.edges, "edges to attack (default 5..11)")
        ->delimiter(',')
        ->check(CLI::Range(5, 11));
    sw->add_flag("--canonical", sweep.canonical, "add keep-phi0, measure-z and measure-x per edge");
    sw->add_flag("--sample", sweep.sample, "sample records when enumeration exceeds the cap");
    sw->add_option("--samples", sweep.samples, "number of sampled records")->check(CLI::PositiveNumber);
    sw->add_option("--tol", sweep.tol, "independence tolerance");
    sw->add_option("--expect", sweep.expect, "expected verdict for every row")
        ->check(CLI::IsMember({"secure", "insecure"}));
    add_common(sw, common, false);

    std::uint32_t classical_p = 3;
    auto* cl = app.add_subcommand("classical", "recovery and secrecy checks of the classical code");
    cl->add_option("--p", classical_p, "odd prime field size");
    add_common(cl, common, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*h) {
            PrimeField{honest.p};
            return cmd_honest(honest, common);
        }
        if (*at) {
            PrimeField{attack.p};
            return cmd_attack(attack, common);
        }
        if (*sw) {
            PrimeField{sweep.p};
            return cmd_sweep(sweep, common);
        }
        PrimeField{classical_p};
        return cmd_classical(classical_p, common);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
