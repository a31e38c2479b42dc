#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parity_qaoa/circuit.hpp"
#include "parity_qaoa/errors.hpp"
#include "parity_qaoa/parallel.hpp"
#include "parity_qaoa/problem_model.hpp"
#include "parity_qaoa/rng.hpp"

namespace parity_qaoa {

using cplx = std::complex<double>;

constexpr std::size_t max_dense_qubits = 26;

inline void check_dense_size(std::size_t k) {
    if (k > max_dense_qubits) {
        throw ResourceLimitError("dense simulation of " + std::to_string(k) + " qubits exceeds the cap of " +
                                 std::to_string(max_dense_qubits) + "; use depth-only commands for larger layouts");
    }
}

/// Dense state over K qubits. Bit m of the basis index is 1 when qubit m is down.
class StateVector {
   public:
    explicit StateVector(std::size_t qubit_count) : qubit_count_(qubit_count) {
        check_dense_size(qubit_count);
        amps_.assign(std::size_t{1} << qubit_count, cplx{0, 0});
        amps_[0] = 1;
    }
    StateVector(std::size_t qubit_count, std::vector<cplx> amps) : qubit_count_(qubit_count), amps_(std::move(amps)) {
        check_dense_size(qubit_count);
        if (amps_.size() != (std::size_t{1} << qubit_count)) {
            throw InvalidArgument("amplitude count does not match qubit count");
        }
    }

    std::size_t qubit_count() const {
        return qubit_count_;
    }
    std::size_t dimension() const {
        return amps_.size();
    }
    const std::vector<cplx> &amplitudes() const {
        return amps_;
    }
    std::vector<cplx> &amplitudes() {
        return amps_;
    }
    double norm() const {
        double s = 0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }

    void apply(const Gate &g) {
        switch (g.kind) {
            case GateKind::H: {
                const double r = std::numbers::sqrt2 / 2;
                single(g.q0, [r](cplx &a0, cplx &a1) {
                    cplx x = a0, y = a1;
                    a0 = r * (x + y);
                    a1 = r * (x - y);
                });
                break;
            }
            case GateKind::RX: {
                const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
                single(g.q0, [c, s](cplx &a0, cplx &a1) {
                    cplx x = a0, y = a1;
                    a0 = c * x + cplx(0, -s) * y;
                    a1 = cplx(0, -s) * x + c * y;
                });
                break;
            }
            case GateKind::RZ: {
                const cplx p0 = std::polar(1.0, -g.angle / 2), p1 = std::polar(1.0, g.angle / 2);
                single(g.q0, [p0, p1](cplx &a0, cplx &a1) {
                    a0 *= p0;
                    a1 *= p1;
                });
                break;
            }
            case GateKind::CNOT: {
                const std::size_t cm = std::size_t{1} << g.q0, tm = std::size_t{1} << g.q1;
                for (std::size_t i = 0; i < amps_.size(); i++) {
                    if ((i & cm) && !(i & tm)) {
                        std::swap(amps_[i], amps_[i | tm]);
                    }
                }
                break;
            }
        }
    }

    /// Pauli 1 = X, 2 = Y, 3 = Z on qubit q; 0 is the identity.
    void apply_pauli(int q, int pauli) {
        switch (pauli) {
            case 1:
                single(q, [](cplx &a0, cplx &a1) { std::swap(a0, a1); });
                break;
            case 2:
                single(q, [](cplx &a0, cplx &a1) {
                    cplx x = a0;
                    a0 = cplx(0, -1) * a1;
                    a1 = cplx(0, 1) * x;
                });
                break;
            case 3:
                single(q, [](cplx &, cplx &a1) { a1 = -a1; });
                break;
            default:
                break;
        }
    }

   private:
    template <class F>
    void single(int q, F &&f) {
        const std::size_t m = std::size_t{1} << q;
        for (std::size_t hi = 0; hi < amps_.size(); hi += 2 * m) {
            for (std::size_t i = hi; i < hi + m; i++) {
                f(amps_[i], amps_[i | m]);
            }
        }
    }

    std::size_t qubit_count_;
    std::vector<cplx> amps_;
};

inline void apply_circuit(StateVector &state, const Circuit &circuit) {
    if (circuit.qubit_count() != state.qubit_count()) {
        throw InvalidArgument("circuit width " + std::to_string(circuit.qubit_count()) + " does not match state width " +
                              std::to_string(state.qubit_count()));
    }
    for (const auto &g : circuit.gates()) {
        state.apply(g);
    }
}

/// Diagonal of H_phys at basis state z: sum_m J_m (1 - 2 z_m) + sum_l c_l [odd parity on l].
inline double physical_energy(const HamiltonianSpec &spec, uint64_t z) {
    double e = 0;
    for (std::size_t m = 0; m < spec.z_terms.size(); m++) {
        e += ((z >> m) & 1) ? -spec.z_terms[m] : spec.z_terms[m];
    }
    for (const auto &t : spec.constraint_terms) {
        if (std::popcount(z & qubit_mask(t.qubits)) & 1) {
            e += t.strength;
        }
    }
    return e;
}

/// All 2^K diagonal values of H_phys with their extremes.
struct EnergyTable {
    std::vector<double> values;
    double e_min = 0;
    double e_max = 0;

    /// Basis states within this tolerance of e_min count as ground states.
    static constexpr double ground_tolerance = 1e-9;
    bool is_ground(uint64_t z) const {
        return values[z] <= e_min + ground_tolerance;
    }
};

inline EnergyTable make_energy_table(const HamiltonianSpec &spec) {
    std::size_t k = spec.qubit_count();
    check_dense_size(k);
    EnergyTable t;
    std::size_t dim = std::size_t{1} << k;
    t.values.assign(dim, 0.0);
    // Build the Z-field part incrementally: flipping bit m subtracts 2 J_m.
    double base = 0;
    for (double j : spec.z_terms) {
        base += j;
    }
    t.values[0] = base;
    for (std::size_t m = 0; m < k; m++) {
        std::size_t half = std::size_t{1} << m;
        for (std::size_t z = half; z < 2 * half; z++) {
            t.values[z] = t.values[z - half] - 2 * spec.z_terms[m];
        }
    }
    for (const auto &term : spec.constraint_terms) {
        uint64_t mask = qubit_mask(term.qubits);
        for (std::size_t z = 0; z < dim; z++) {
            if (std::popcount(z & mask) & 1) {
                t.values[z] += term.strength;
            }
        }
    }
    t.e_min = std::numeric_limits<double>::infinity();
    t.e_max = -std::numeric_limits<double>::infinity();
    for (double v : t.values) {
        t.e_min = std::min(t.e_min, v);
        t.e_max = std::max(t.e_max, v);
    }
    return t;
}

inline std::pair<double, double> extreme_energies(const HamiltonianSpec &spec) {
    auto t = make_energy_table(spec);
    return {t.e_min, t.e_max};
}

inline double energy(const StateVector &state, const EnergyTable &table) {
    double e = 0;
    const auto &a = state.amplitudes();
    for (std::size_t z = 0; z < a.size(); z++) {
        e += std::norm(a[z]) * table.values[z];
    }
    return e;
}

inline double energy(const StateVector &state, const HamiltonianSpec &spec) {
    return energy(state, make_energy_table(spec));
}

inline double ground_population(const StateVector &state, const EnergyTable &table) {
    double p = 0;
    const auto &a = state.amplitudes();
    for (std::size_t z = 0; z < a.size(); z++) {
        if (table.is_ground(z)) {
            p += std::norm(a[z]);
        }
    }
    return p;
}

inline double ground_population(const StateVector &state, const HamiltonianSpec &spec) {
    return ground_population(state, make_energy_table(spec));
}

/// Probability mass on basis states with even parity on every listed constraint.
inline double codespace_population(const StateVector &state, const ParityLayout &layout,
                                   std::span<const int> constraint_ids) {
    std::vector<uint64_t> masks;
    for (int c : constraint_ids) {
        masks.push_back(qubit_mask(layout.constraint(c).qubits));
    }
    double p = 0;
    const auto &a = state.amplitudes();
    for (std::size_t z = 0; z < a.size(); z++) {
        bool ok = true;
        for (uint64_t m : masks) {
            ok &= !(std::popcount(z & m) & 1);
        }
        if (ok) {
            p += std::norm(a[z]);
        }
    }
    return p;
}

struct NoiseModel {
    double two_qubit_error_rate = 0;
    double single_qubit_error_rate = 1e-3;
    std::size_t trajectories = 500;
    uint64_t seed = 0;

    void validate() const {
        auto in_unit = [](double r) { return r >= 0 && r <= 1; };
        if (!in_unit(two_qubit_error_rate) || !in_unit(single_qubit_error_rate)) {
            throw InvalidArgument("error rates must lie in [0, 1]");
        }
        if (trajectories < 1) {
            throw InvalidArgument("at least one trajectory is required");
        }
    }
    bool noiseless() const {
        return two_qubit_error_rate == 0 && single_qubit_error_rate == 0;
    }
};

struct Expectations {
    double energy = 0;
    double ground_population = 0;
};

/// One noisy trajectory: after each gate, with the gate's error rate, a Pauli drawn
/// uniformly from {I,X,Y,Z}^n acts on its n operands.
inline Expectations run_trajectory(const Circuit &circuit, const EnergyTable &table, const NoiseModel &noise,
                                   Rng &rng) {
    StateVector state(circuit.qubit_count());
    for (const auto &g : circuit.gates()) {
        state.apply(g);
        double rate = g.two_qubit() ? noise.two_qubit_error_rate : noise.single_qubit_error_rate;
        if (rate > 0 && rng.uniform() < rate) {
            state.apply_pauli(g.q0, static_cast<int>(rng.below(4)));
            if (g.two_qubit()) {
                state.apply_pauli(g.q1, static_cast<int>(rng.below(4)));
            }
        }
    }
    return {energy(state, table), ground_population(state, table)};
}

/// Trajectory averages of <H_phys> and ground population. Trajectory i draws from
/// stream (seed, i); results are summed in trajectory order, so the output does not
/// depend on the thread count. Zero rates reduce to a single exact noiseless run.
inline Expectations noisy_expectations(const Circuit &circuit, const HamiltonianSpec &spec, const NoiseModel &noise,
                                       std::size_t threads = 1) {
    noise.validate();
    if (circuit.qubit_count() != spec.qubit_count()) {
        throw InvalidArgument("circuit and Hamiltonian widths differ");
    }
    auto table = make_energy_table(spec);
    if (noise.noiseless()) {
        Rng unused(noise.seed);
        return run_trajectory(circuit, table, noise, unused);
    }
    std::vector<Expectations> per(noise.trajectories);
    parallel_for(noise.trajectories, threads, [&](std::size_t i) {
        Rng rng({noise.seed, static_cast<uint64_t>(i)});
        per[i] = run_trajectory(circuit, table, noise, rng);
    });
    Expectations sum;
    for (const auto &e : per) {
        sum.energy += e.energy;
        sum.ground_population += e.ground_population;
    }
    double n = static_cast<double>(noise.trajectories);
    return {sum.energy / n, sum.ground_population / n};
}

}  // namespace parity_qaoa
