#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "../oracles.hpp"
#include "parity_qaoa/parity_qaoa.hpp"

using namespace parity_qaoa;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::vector<ConstraintPartition> standard_partitions(const ParityLayout &l) {
    return {partition_all_implicit(l), partition_three_body_explicit(l), partition_all_explicit(l)};
}

ParityLayout random_layout(int n, uint64_t seed) {
    auto base = generate_complete_layout(n);
    return base.with_coefficients(draw_coefficients(base.qubit_count(), seed, 0));
}

std::vector<double> random_params(std::size_t count, uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0, 2 * std::numbers::pi);
    std::vector<double> p(count);
    for (auto &v : p) {
        v = u(gen);
    }
    return p;
}

Verdict structure_counts() {
    auto l = generate_complete_layout(6);
    std::size_t three = 0;
    for (const auto &c : l.constraints()) {
        three += c.kind == ConstraintKind::three_body;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "K=%zu constraints=%zu three-body=%zu", l.qubit_count(), l.constraints().size(),
                  three);
    return {l.qubit_count() == 15 && l.constraints().size() == 10 && three == 4, buf};
}

Verdict codespace_dimension() {
    int checked = 0;
    for (int n = 4; n <= 6; n++) {
        auto l = generate_complete_layout(n);
        int n_s = count_symmetries(l.spin_problem());
        for (const auto &p : standard_partitions(l)) {
            auto space = enumerate_codespace(l, p.implicit_ids());
            std::size_t want = std::size_t{1} << (n + static_cast<int>(p.n_explicit()) - n_s);
            if (space.size() != want) {
                return {false, "N=" + std::to_string(n) + " n_C=" + std::to_string(p.n_explicit()) + ": " +
                                   std::to_string(space.size()) + " != " + std::to_string(want)};
            }
            checked++;
        }
    }
    return {true, std::to_string(checked) + " cases"};
}

Verdict driver_validity() {
    int checked = 0;
    for (int n = 4; n <= 8; n++) {
        auto l = generate_complete_layout(n);
        for (const auto &p : standard_partitions(l)) {
            auto d = assign_priorities(synthesize_driver_set(l, p));
            auto r = validate_driver_set(d, l, p);
            if (!r.passed()) {
                return {false, "N=" + std::to_string(n) + " n_C=" + std::to_string(p.n_explicit())};
            }
            checked++;
        }
    }
    return {true, std::to_string(checked) + " driver sets"};
}

Verdict circuit_correctness() {
    double worst = 0;
    int checked = 0;
    auto track = [&](double err) {
        worst = std::max(worst, err);
        checked++;
    };
    for (int n = 4; n <= 6; n++) {
        auto l = generate_complete_layout(n);
        for (const auto &p : standard_partitions(l)) {
            for (const auto &line : synthesize_driver_set(l, p).lines) {
                if (line.qubits.size() > 10) {
                    continue;
                }
                auto u = oracle::circuit_unitary(driver_term_circuit(l, line, 0.83), line.qubits);
                auto want = oracle::evolve(
                    oracle::x_string(line.qubits.size(), (uint64_t{1} << line.qubits.size()) - 1), 0.83);
                track(oracle::phase_distance(u, want));
            }
        }
    }
    auto six = generate_complete_layout(6);
    for (const auto &c : six.constraints()) {
        std::vector<double> d(std::size_t{1} << c.qubits.size());
        for (std::size_t z = 0; z < d.size(); z++) {
            d[z] = 1.7 * (std::popcount(z) & 1);
        }
        auto u = oracle::circuit_unitary(constraint_circuit(six, c.id, 1.7, 0.45), c.qubits);
        track(oracle::phase_distance(u, oracle::evolve(oracle::diagonal(d), 0.45)));
    }
    for (int n : {4, 5}) {
        auto l = random_layout(n, static_cast<uint64_t>(n));
        auto spec = build_hamiltonians(l);
        std::size_t k = l.qubit_count();
        std::vector<double> d(std::size_t{1} << k);
        std::vector<int> qs(k);
        for (std::size_t m = 0; m < k; m++) {
            qs[m] = static_cast<int>(m);
        }
        for (std::size_t z = 0; z < d.size(); z++) {
            for (std::size_t m = 0; m < k; m++) {
                d[z] += spec.z_terms[m] * (((z >> m) & 1) ? -1.0 : 1.0);
            }
        }
        auto u = oracle::circuit_unitary(phase_separator_circuit(spec, 0.61), qs);
        track(oracle::phase_distance(u, oracle::evolve(oracle::diagonal(d), 0.61)));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d sub-circuits, max deviation %.2e", checked, worst);
    return {worst < 1e-10, buf};
}

Verdict depth_bound() {
    auto l = generate_complete_layout(12);
    std::string detail;
    bool ok = true;
    for (int n = 1; n <= 10; n++) {
        std::vector<int> path;
        for (int i = 0; i < n; i++) {
            path.push_back(i);
        }
        std::size_t d = schedule(driver_term_circuit(l, make_line(l, path), 0.5));
        ok &= d <= static_cast<std::size_t>(n + 2);
        detail += (n > 1 ? " " : "") + std::to_string(d);
    }
    return {ok, "depths " + detail};
}

Verdict initial_state() {
    double worst = 0;
    for (int n = 4; n <= 6; n++) {
        auto l = generate_complete_layout(n);
        for (const auto &p : standard_partitions(l)) {
            auto d = assign_priorities(synthesize_driver_set(l, p));
            StateVector s(l.qubit_count());
            apply_circuit(s, init_state_circuit(l, d, p));
            auto space = oracle::codespace(l, p.implicit_ids());
            double amp = 1 / std::sqrt(static_cast<double>(space.size()));
            const auto &a = s.amplitudes();
            std::size_t first = *space.begin();
            cplx phase = a[first] / std::abs(a[first]);
            for (std::size_t z = 0; z < a.size(); z++) {
                cplx want = space.count(z) ? phase * amp : cplx(0);
                worst = std::max(worst, std::abs(a[z] - want));
            }
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "max amplitude error %.2e", worst);
    return {worst < 1e-9, buf};
}

Verdict subspace_conservation() {
    double worst = 0;
    for (int n : {4, 5, 6}) {
        auto l = random_layout(n, 10 + static_cast<uint64_t>(n));
        auto spec = build_hamiltonians(l);
        for (Mode m : {Mode::implicit, Mode::hybrid}) {
            auto p = partition_for_mode(m, l);
            auto d = assign_priorities(synthesize_driver_set(l, p));
            auto params = random_params(3 * params_per_cycle(p), static_cast<uint64_t>(n));
            StateVector s(l.qubit_count());
            apply_circuit(s, qaoa_circuit(m, l, p, d, spec, unpack_params(params, p)));
            worst = std::max(worst, std::abs(1 - codespace_population(s, l, p.implicit_ids())));
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "max leakage %.2e", worst);
    return {worst < 1e-9, buf};
}

Verdict depth_scan_shape() {
    std::size_t prev = 0;
    bool ok = true;
    std::string detail;
    for (int n : {6, 8, 10}) {
        auto scan = depth_scan(n, false);
        std::size_t implicit_depth = scan.front().depth;
        ok &= scan.front().n_r == 0 && implicit_depth > prev;
        prev = implicit_depth;
        for (const auto &p : scan) {
            if (p.marker) {
                ok &= p.depth < implicit_depth;
                detail += "N=" + std::to_string(n) + " implicit " + std::to_string(implicit_depth) + " three-body " +
                          std::to_string(p.depth) + "; ";
            }
        }
    }
    std::size_t dd[2];
    int i = 0;
    for (int n : {20, 40}) {
        auto l = generate_complete_layout(n);
        auto p = depth_point(l, modularize(l, 4, partition_three_body_explicit(l)));
        if (!p) {
            return {false, detail + "no valid driver set at N=" + std::to_string(n)};
        }
        dd[i++] = p->driver_depth;
    }
    ok &= dd[0] == dd[1];
    detail += "driver depth l_max=4 N=20 " + std::to_string(dd[0]) + " N=40 " + std::to_string(dd[1]);
    return {ok, detail};
}

Verdict qaoa_ordering() {
    EnsembleConfig cfg;
    cfg.n_spins = 6;
    cfg.instances = 20;
    cfg.qaoa.p = 3;
    cfg.qaoa.restarts = 100;
    cfg.seed = 1;
    cfg.threads = default_thread_count();
    auto rows = ensemble_experiment(cfg).rows;
    double imp = rows[0].median_eres, hyb = rows[1].median_eres, exp = rows[2].median_eres;
    char buf[128];
    std::snprintf(buf, sizeof buf, "median residual energy implicit %.4f hybrid %.4f explicit %.4f", imp, hyb, exp);
    return {imp < exp && imp <= hyb && hyb <= exp, buf};
}

Verdict noise_determinism() {
    auto l = random_layout(4, 5);
    auto spec = build_hamiltonians(l);
    auto p = partition_three_body_explicit(l);
    auto d = assign_priorities(synthesize_driver_set(l, p));
    auto c = qaoa_circuit(Mode::hybrid, l, p, d, spec, unpack_params(random_params(6, 2), p));
    StateVector s(l.qubit_count());
    apply_circuit(s, c);
    NoiseModel zero;
    zero.single_qubit_error_rate = 0;
    auto ex = noisy_expectations(c, spec, zero);
    bool exact = ex.energy == energy(s, spec) && ex.ground_population == ground_population(s, spec);

    EnsembleConfig cfg;
    cfg.n_spins = 4;
    cfg.instances = 3;
    cfg.qaoa.p = 1;
    cfg.qaoa.restarts = 2;
    cfg.noise_rates = {0.0, 0.05};
    cfg.trajectories = 50;
    cfg.seed = 7;
    auto first = results_csv(ensemble_experiment(cfg).rows);
    cfg.threads = default_thread_count() + 1;
    bool identical = first == results_csv(ensemble_experiment(cfg).rows);

    std::vector<double> j{1.0};
    auto one = build_hamiltonians(generate_complete_layout(2, j));
    Circuit rz(1);
    rz.add(Gate::rz(0, 0.3));
    NoiseModel full;
    full.single_qubit_error_rate = 1.0;
    full.trajectories = 4000;
    full.seed = 17;
    double z = noisy_expectations(rz, one, full).energy;
    bool limit = std::abs(z) <= 3 / std::sqrt(4000.0);

    char buf[128];
    std::snprintf(buf, sizeof buf, "rate0 exact %s, csv identical %s, depolarized <Z> %.4f", exact ? "yes" : "no",
                  identical ? "yes" : "no", z);
    return {exact && identical && limit, buf};
}

}  // namespace

int main() {
    const std::pair<const char *, std::function<Verdict()>> criteria[] = {
        {"structure counts", structure_counts},
        {"codespace dimension", codespace_dimension},
        {"driver validity", driver_validity},
        {"circuit correctness", circuit_correctness},
        {"driver term depth bound", depth_bound},
        {"initial state", initial_state},
        {"subspace conservation", subspace_conservation},
        {"depth scan shape", depth_scan_shape},
        {"qaoa ordering", qaoa_ordering},
        {"noise determinism and limit", noise_determinism},
    };
    int failures = 0, index = 1;
    for (const auto &[name, check] : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d %s: %s (%s; %.1f s)\n", index++, name, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                    sec);
        std::fflush(stdout);
        failures += !v.pass;
    }
    return failures == 0 ? 0 : 1;
}
