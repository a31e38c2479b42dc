#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "parity_qaoa/circuit.hpp"
#include "parity_qaoa/circuit_builder.hpp"
#include "parity_qaoa/driver_synth.hpp"
#include "parity_qaoa/errors.hpp"
#include "parity_qaoa/parallel.hpp"
#include "parity_qaoa/partitioner.hpp"
#include "parity_qaoa/problem_model.hpp"
#include "parity_qaoa/rng.hpp"
#include "parity_qaoa/simulator.hpp"
#include "parity_qaoa/subspace_kernels.hpp"

namespace parity_qaoa {

inline double residual_energy(double e, double e_min, double e_max) {
    if (!(e_max > e_min)) {
        throw DegenerateSpectrum("residual energy undefined: E_max equals E_min");
    }
    return (e - e_min) / (e_max - e_min);
}

/// Linear-interpolation percentile (q in [0, 100]) between closest ranks.
inline double percentile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw InvalidArgument("percentile of an empty list");
    }
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1) * q / 100.0;
    auto lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct Evaluation {
    double energy = 0;
    double fidelity = 0;
};

/// Amplitudes over the reachable subspace, stored as split real and imaginary parts.
class SubspaceState {
   public:
    SubspaceState() = default;
    explicit SubspaceState(std::size_t dim) {
        resize(dim);
    }
    void resize(std::size_t dim) {
        if (dim != dim_ || data_.empty()) {
            dim_ = dim;
            data_.assign(2 * dim + detail::split_skew, 0.0);
        }
    }
    std::size_t size() const {
        return dim_;
    }
    double *re() {
        return data_.data();
    }
    double *im() {
        return data_.data() + dim_ + detail::split_skew;
    }
    const double *re() const {
        return data_.data();
    }
    const double *im() const {
        return data_.data() + dim_ + detail::split_skew;
    }
    cplx amplitude(std::size_t x) const {
        return {re()[x], im()[x]};
    }

   private:
    std::size_t dim_ = 0;
    detail::AlignedDoubles data_;
};

/// Noiseless QAOA evolution restricted to the states reachable from the initial
/// superposition: basis index x selects the XOR of the driver lines whose bits are set.
/// Driver layers become independent RX rotations on these |lines| virtual qubits.
/// Field terms of qubits owned by a single line fold into that line's rotation; the
/// rest of the diagonal (penalties, fields of shared qubits) is applied per amplitude.
class SubspaceEvaluator {
   public:
    SubspaceEvaluator(Mode mode, const ParityLayout &layout, const ConstraintPartition &partition,
                      const DriverSet &drivers, const HamiltonianSpec &spec)
        : has_explicit_(partition.n_explicit() > 0), per_cycle_(parity_qaoa::params_per_cycle(partition)) {
        check_mode(mode, partition);
        std::size_t k = layout.qubit_count();
        check_dense_size(k);
        std::size_t d = drivers.lines.size();
        check_dense_size(d);
        if (!validate_driver_set(drivers, layout, partition).passed()) {
            throw InvalidArgument("driver set is not valid for this partition");
        }
        lines_ = d;
        std::size_t dim = std::size_t{1} << d;
        std::vector<uint64_t> line_masks;
        std::vector<int> owners(k, 0);
        for (const auto &l : drivers.lines) {
            line_masks.push_back(qubit_mask(l.qubits));
            for (int q : l.qubits) {
                owners[static_cast<std::size_t>(q)]++;
            }
        }
        z_terms_ = spec.z_terms;
        exclusive_field_.assign(d, 0);
        line_shared_.resize(d);
        for (std::size_t b = 0; b < d; b++) {
            for (int q : drivers.lines[b].qubits) {
                if (owners[static_cast<std::size_t>(q)] == 1) {
                    exclusive_field_[b] += spec.z_terms[static_cast<std::size_t>(q)];
                } else {
                    line_shared_[b].push_back(q);
                }
            }
        }
        for (std::size_t m = 0; m < k; m++) {
            if (owners[m] > 1) {
                shared_field0_ += spec.z_terms[m];
                has_shared_ = true;
            }
        }
        std::vector<uint64_t> explicit_masks;
        std::vector<double> explicit_strength;
        for (const auto &t : spec.constraint_terms) {
            if (partition.is_explicit(t.constraint_id)) {
                explicit_masks.push_back(qubit_mask(t.qubits));
                explicit_strength.push_back(t.strength);
            }
        }
        auto extremes = extreme_energies(spec);
        e_min_ = extremes.first;
        e_max_ = extremes.second;
        codeword_.assign(dim, 0);
        penalty_index_.assign(dim, 0);
        energy_.assign(dim, 0);
        ground_.assign(dim, 0);
        for (std::size_t x = 1; x < dim; x++) {
            std::size_t low = static_cast<std::size_t>(std::countr_zero(x));
            codeword_[x] = codeword_[x & (x - 1)] ^ line_masks[low];
        }
        for (std::size_t x = 0; x < dim; x++) {
            uint64_t z = codeword_[x];
            double pen = 0;
            for (std::size_t i = 0; i < explicit_masks.size(); i++) {
                if (std::popcount(z & explicit_masks[i]) & 1) {
                    pen += explicit_strength[i];
                }
            }
            auto it = std::find(penalty_values_.begin(), penalty_values_.end(), pen);
            penalty_index_[x] = static_cast<uint32_t>(it - penalty_values_.begin());
            if (it == penalty_values_.end()) {
                penalty_values_.push_back(pen);
            }
            energy_[x] = physical_energy(spec, z);
            ground_[x] = energy_[x] <= e_min_ + EnergyTable::ground_tolerance;
        }
        if (penalty_values_.size() <= detail::small_table) {
            penalty_small_.assign(penalty_index_.begin(), penalty_index_.end());
        }
    }

    std::size_t dimension() const {
        return codeword_.size();
    }
    std::size_t params_per_cycle() const {
        return per_cycle_;
    }
    double e_min() const {
        return e_min_;
    }
    double e_max() const {
        return e_max_;
    }
    uint64_t codeword(std::size_t x) const {
        return codeword_[x];
    }

    SubspaceState initial_state() const {
        SubspaceState st(dimension());
        std::fill(st.re(), st.re() + dimension(), 1.0 / std::sqrt(static_cast<double>(dimension())));
        return st;
    }

    /// One cycle: constraint penalty (omega), local fields (gamma), drivers (beta).
    /// `in` and `out` must be distinct states.
    void apply_cycle(const SubspaceState &in, SubspaceState &out, const double *cycle) const {
        const double omega = has_explicit_ ? cycle[0] : 0;
        const double gamma = cycle[per_cycle_ - 2];
        const double beta = cycle[per_cycle_ - 1];
        const std::size_t dim = in.size();
        out.resize(dim);
        const std::size_t low_bits = std::min(lines_, detail::block_bits);
        const std::size_t block = std::size_t{1} << low_bits;
        const std::size_t blocks = dim / block;

        // Exclusive fields are separable: phase(x) = lo[x mod block] * hi[x / block].
        auto &table = scratch();
        table.resize(2 * (block + blocks) + 2 * block + (has_shared_ ? 2 * dim : 0));
        double *lo_r = table.data(), *lo_i = lo_r + block;
        double *hi_r = lo_i + block, *hi_i = hi_r + blocks;
        double *ph_r = hi_i + blocks, *ph_i = ph_r + block;
        double base = gamma * shared_field0_;
        for (double f : exclusive_field_) {
            base += gamma * f;
        }
        lo_r[0] = std::cos(base);
        lo_i[0] = -std::sin(base);
        hi_r[0] = 1;
        hi_i[0] = 0;
        for (std::size_t b = 0; b < lines_; b++) {
            const double ph = 2 * gamma * exclusive_field_[b];
            if (b < low_bits) {
                detail::scale_block(lo_r, lo_i, std::size_t{1} << b, std::cos(ph), std::sin(ph));
            } else {
                detail::scale_block(hi_r, hi_i, std::size_t{1} << (b - low_bits), std::cos(ph), std::sin(ph));
            }
        }
        double *gr = nullptr, *gi = nullptr;
        if (has_shared_) {
            // Fields of qubits on several lines: flipping one from up to down multiplies by exp(2i gamma J).
            gr = ph_i + block;
            gi = gr + dim;
            std::vector<double> cr(z_terms_.size()), ci(z_terms_.size());
            for (std::size_t m = 0; m < z_terms_.size(); m++) {
                cr[m] = std::cos(2 * gamma * z_terms_[m]);
                ci[m] = std::sin(2 * gamma * z_terms_[m]);
            }
            gr[0] = 1;
            gi[0] = 0;
            for (std::size_t x = 1; x < dim; x++) {
                std::size_t prev = x & (x - 1);
                uint64_t z = codeword_[prev];
                double ar = gr[prev], ai = gi[prev];
                for (int m : line_shared_[static_cast<std::size_t>(std::countr_zero(x))]) {
                    double br = cr[static_cast<std::size_t>(m)];
                    double bi = ((z >> m) & 1) ? -ci[static_cast<std::size_t>(m)] : ci[static_cast<std::size_t>(m)];
                    double t = ar * br - ai * bi;
                    ai = ar * bi + ai * br;
                    ar = t;
                }
                gr[x] = ar;
                gi[x] = ai;
            }
        }
        const bool penalized = penalty_values_.size() > 1;
        const bool small = penalized && !penalty_small_.empty();
        double pr[detail::small_table] = {}, pi[detail::small_table] = {};
        std::vector<double> wide_r, wide_i;
        if (penalized) {
            if (!small) {
                wide_r.resize(penalty_values_.size());
                wide_i.resize(penalty_values_.size());
            }
            double *r = small ? pr : wide_r.data(), *i = small ? pi : wide_i.data();
            for (std::size_t v = 0; v < penalty_values_.size(); v++) {
                r[v] = std::cos(omega * penalty_values_[v]);
                i[v] = -std::sin(omega * penalty_values_[v]);
            }
        }

        const double c = std::cos(beta), s = std::sin(beta);
        for (std::size_t h = 0; h < blocks; h++) {
            const std::size_t off = h * block;
            const double *t_r = lo_r, *t_i = lo_i;
            double hr = hi_r[h], hi = hi_i[h];
            if (gr) {
                detail::scale_into(lo_r, lo_i, ph_r, ph_i, block, hr, hi);
                detail::multiply_into(ph_r, ph_i, gr + off, gi + off, block);
                t_r = ph_r;
                t_i = ph_i;
                hr = 1;
                hi = 0;
            }
            double *re = out.re() + off, *im = out.im() + off;
            if (small && block % 8 == 0) {
                detail::apply_phase_small(in.re() + off, in.im() + off, t_r, t_i, hr, hi, penalty_small_.data() + off,
                                          pr, pi, re, im, block);
            } else if (penalized) {
                const double *tab_r = small ? pr : wide_r.data(), *tab_i = small ? pi : wide_i.data();
                detail::apply_phase(in.re() + off, in.im() + off, t_r, t_i, hr, hi, penalty_index_.data() + off,
                                    tab_r, tab_i, re, im, block);
            } else {
                detail::apply_phase(in.re() + off, in.im() + off, t_r, t_i, hr, hi, nullptr, nullptr, nullptr, re, im,
                                    block);
            }
            detail::rotate_all(re, im, low_bits, c, s);
        }
        if (lines_ > low_bits) {
            detail::rotate_upper(out.re(), out.im(), low_bits, lines_, c, s);
        }
    }

    void apply_cycle(SubspaceState &st, const double *cycle) const {
        SubspaceState next;
        apply_cycle(st, next, cycle);
        st = std::move(next);
    }

    Evaluation measure(const SubspaceState &st) const {
        Evaluation ev;
        const double *re = st.re(), *im = st.im();
        for (std::size_t x = 0; x < st.size(); x++) {
            double p = re[x] * re[x] + im[x] * im[x];
            ev.energy += p * energy_[x];
            if (ground_[x]) {
                ev.fidelity += p;
            }
        }
        return ev;
    }

    /// Amplitudes indexed by subspace basis index x (not by codeword).
    std::vector<cplx> final_state(std::span<const double> params) const {
        check_arity(params);
        auto st = initial_state();
        for (std::size_t i = 0; i < params.size(); i += per_cycle_) {
            apply_cycle(st, params.data() + i);
        }
        std::vector<cplx> out(st.size());
        for (std::size_t x = 0; x < out.size(); x++) {
            out[x] = st.amplitude(x);
        }
        return out;
    }

    Evaluation evaluate(std::span<const double> params) const {
        check_arity(params);
        auto st = initial_state();
        for (std::size_t i = 0; i < params.size(); i += per_cycle_) {
            apply_cycle(st, params.data() + i);
        }
        return measure(st);
    }

    void check_arity(std::span<const double> params) const {
        if (params.empty() || params.size() % per_cycle_ != 0) {
            throw InvalidArgument("expected a multiple of " + std::to_string(per_cycle_) + " parameters, got " +
                                  std::to_string(params.size()));
        }
    }

   private:
    static detail::AlignedDoubles &scratch() {
        thread_local detail::AlignedDoubles buf;
        return buf;
    }

    bool has_explicit_;
    std::size_t per_cycle_;
    std::size_t lines_ = 0;
    double e_min_ = 0, e_max_ = 0;
    std::vector<double> z_terms_;
    std::vector<double> exclusive_field_;
    std::vector<std::vector<int>> line_shared_;
    double shared_field0_ = 0;
    bool has_shared_ = false;
    std::vector<uint64_t> codeword_;
    std::vector<uint32_t> penalty_index_;
    std::vector<uint8_t> penalty_small_;
    std::vector<double> penalty_values_;
    std::vector<double> energy_;
    std::vector<char> ground_;
};

/// Gate-level evaluation: builds the QAOA circuit and simulates it exactly.
inline Evaluation evaluate(Mode mode, const ParityLayout &layout, const ConstraintPartition &partition,
                           const DriverSet &drivers, const HamiltonianSpec &spec, std::span<const double> params) {
    auto cycles = unpack_params(params, partition);
    auto circuit = qaoa_circuit(mode, layout, partition, drivers, spec, cycles);
    StateVector state(layout.qubit_count());
    apply_circuit(state, circuit);
    auto table = make_energy_table(spec);
    return {energy(state, table), ground_population(state, table)};
}

struct QaoaConfig {
    std::size_t p = 3;
    std::size_t restarts = 100;
    uint64_t seed = 0;
    std::size_t max_rejections = 0;  // 0 selects 50 x parameter count
    double step = std::numbers::pi / 8;
    std::size_t max_evaluations = 1000000;  // per restart, safety cap only

    void validate() const {
        if (p < 1) {
            throw InvalidArgument("p must be at least 1");
        }
        if (restarts < 1) {
            throw InvalidArgument("restarts must be at least 1");
        }
        if (!(step > 0)) {
            throw InvalidArgument("update step must be positive");
        }
    }
};

struct RestartTrace {
    double initial_energy = 0;
    double final_energy = 0;
    std::size_t evaluations = 0;
    std::size_t accepted = 0;
};

struct QaoaResult {
    std::vector<double> params;
    double energy = 0;
    double fidelity = 0;
    double e_min = 0;
    double e_max = 0;
    double residual_energy = 0;
    std::size_t cnot_count = 0;
    std::size_t single_qubit_count = 0;
    std::size_t depth = 0;
    std::vector<RestartTrace> restarts;
};

/// Random-restart accept/reject search. Each restart draws every parameter from
/// [0, 2 pi), then repeatedly perturbs one parameter by U(-step, step) and keeps the
/// move only if the energy strictly drops, until max_rejections consecutive misses.
inline QaoaResult optimize(const SubspaceEvaluator &eval, const QaoaConfig &config) {
    config.validate();
    const std::size_t per = eval.params_per_cycle();
    const std::size_t n = per * config.p;
    const std::size_t max_rej = config.max_rejections ? config.max_rejections : 50 * n;
    const double two_pi = 2 * std::numbers::pi;

    QaoaResult best;
    bool have_best = false;
    std::vector<SubspaceState> cache(config.p + 1), trial(config.p + 1);
    for (std::size_t r = 0; r < config.restarts; r++) {
        Rng rng({config.seed, static_cast<uint64_t>(r)});
        std::vector<double> params(n);
        for (auto &v : params) {
            v = rng.uniform(0, two_pi);
        }
        cache[0] = eval.initial_state();
        for (std::size_t k = 0; k < config.p; k++) {
            eval.apply_cycle(cache[k], cache[k + 1], params.data() + k * per);
        }
        RestartTrace trace;
        Evaluation current = eval.measure(cache[config.p]);
        trace.initial_energy = current.energy;
        trace.evaluations = 1;
        std::size_t rejections = 0;
        while (rejections < max_rej && trace.evaluations < config.max_evaluations) {
            std::size_t idx = static_cast<std::size_t>(rng.below(n));
            double old = params[idx];
            double proposal = std::fmod(old + rng.uniform(-config.step, config.step), two_pi);
            if (proposal < 0) {
                proposal += two_pi;
            }
            params[idx] = proposal;
            std::size_t k0 = idx / per;
            for (std::size_t k = k0; k < config.p; k++) {
                eval.apply_cycle(k == k0 ? cache[k] : trial[k], trial[k + 1], params.data() + k * per);
            }
            Evaluation ev = eval.measure(trial[config.p]);
            trace.evaluations++;
            if (ev.energy < current.energy) {
                current = ev;
                for (std::size_t k = k0 + 1; k <= config.p; k++) {
                    std::swap(cache[k], trial[k]);
                }
                rejections = 0;
                trace.accepted++;
            } else {
                params[idx] = old;
                rejections++;
            }
        }
        trace.final_energy = current.energy;
        best.restarts.push_back(trace);
        if (!have_best || current.energy < best.energy) {
            have_best = true;
            best.params = params;
            best.energy = current.energy;
            best.fidelity = current.fidelity;
        }
    }
    best.e_min = eval.e_min();
    best.e_max = eval.e_max();
    best.residual_energy = residual_energy(best.energy, best.e_min, best.e_max);
    return best;
}

/// Optimizes and fills in circuit statistics for the best parameters.
inline QaoaResult optimize(Mode mode, const ParityLayout &layout, const ConstraintPartition &partition,
                           const DriverSet &drivers, const HamiltonianSpec &spec, const QaoaConfig &config) {
    SubspaceEvaluator eval(mode, layout, partition, drivers, spec);
    auto result = optimize(eval, config);
    auto circuit = qaoa_circuit(mode, layout, partition, drivers, spec, unpack_params(result.params, partition));
    result.cnot_count = circuit.count(GateKind::CNOT);
    result.single_qubit_count = circuit.size() - result.cnot_count;
    result.depth = schedule(circuit);
    return result;
}

inline ConstraintPartition partition_for_mode(Mode mode, const ParityLayout &layout) {
    switch (mode) {
        case Mode::explicit_:
            return partition_all_explicit(layout);
        case Mode::implicit:
            return partition_all_implicit(layout);
        case Mode::hybrid:
            return partition_three_body_explicit(layout);
    }
    return partition_all_explicit(layout);
}

/// Local fields J_m ~ U[-1, 1] for one ensemble instance.
inline std::vector<double> draw_coefficients(std::size_t count, uint64_t seed, std::size_t instance) {
    Rng rng({seed, 1, static_cast<uint64_t>(instance)});
    std::vector<double> j(count);
    for (auto &v : j) {
        v = rng.uniform(-1.0, 1.0);
    }
    return j;
}

struct EnsembleConfig {
    int n_spins = 6;
    std::vector<Mode> modes{Mode::implicit, Mode::hybrid, Mode::explicit_};
    std::size_t instances = 96;
    QaoaConfig qaoa;
    std::vector<double> noise_rates{0.0};
    double single_qubit_error_rate = 1e-3;
    std::size_t trajectories = 500;
    uint64_t seed = 0;
    double constraint_strength = 1.0;
    std::size_t threads = 1;
};

struct InstanceOutcome {
    Mode mode = Mode::implicit;
    std::size_t instance = 0;
    QaoaResult result;
    std::vector<double> residual_energy;  // per noise rate
    std::vector<double> fidelity;         // per noise rate
};

struct EnsembleRow {
    Mode mode = Mode::implicit;
    double n_r = 0;
    double noise_rate = 0;
    double median_eres = 0, q25_eres = 0, q75_eres = 0;
    double median_fidelity = 0, q25_fidelity = 0, q75_fidelity = 0;
    std::size_t instances = 0;
};

struct EnsembleResult {
    std::vector<EnsembleRow> rows;
    std::vector<InstanceOutcome> outcomes;  // ordered by (mode, instance)
};

/// Noiseless optimization per instance and mode, then re-evaluation of the best
/// circuit at every noise rate. A rate of 0 reports the noiseless optimum itself.
inline EnsembleResult ensemble_experiment(const EnsembleConfig &cfg) {
    cfg.qaoa.validate();
    if (cfg.instances < 1) {
        throw InvalidArgument("at least one instance is required");
    }
    auto base = generate_complete_layout(cfg.n_spins);
    check_dense_size(base.qubit_count());
    struct ModeSetup {
        ConstraintPartition partition;
        DriverSet drivers;
    };
    std::vector<ModeSetup> setups;
    for (Mode m : cfg.modes) {
        auto part = partition_for_mode(m, base);
        setups.push_back({part, assign_priorities(synthesize_driver_set(base, part))});
    }
    const std::size_t n_modes = cfg.modes.size();
    EnsembleResult out;
    out.outcomes.resize(n_modes * cfg.instances);
    parallel_for(out.outcomes.size(), cfg.threads, [&](std::size_t task) {
        std::size_t mi = task / cfg.instances, inst = task % cfg.instances;
        auto j = draw_coefficients(base.qubit_count(), cfg.seed, inst);
        auto layout = base.with_coefficients(j);
        auto spec = build_hamiltonians(layout, cfg.constraint_strength);
        const auto &setup = setups[mi];
        QaoaConfig qc = cfg.qaoa;
        qc.seed = Rng({cfg.seed, 2, static_cast<uint64_t>(inst), static_cast<uint64_t>(mi)}).next();
        InstanceOutcome o;
        o.mode = cfg.modes[mi];
        o.instance = inst;
        o.result = optimize(cfg.modes[mi], layout, setup.partition, setup.drivers, spec, qc);
        Circuit circuit;
        bool built = false;
        for (std::size_t ri = 0; ri < cfg.noise_rates.size(); ri++) {
            double rate = cfg.noise_rates[ri];
            if (rate == 0) {
                o.residual_energy.push_back(o.result.residual_energy);
                o.fidelity.push_back(o.result.fidelity);
                continue;
            }
            if (!built) {
                circuit = qaoa_circuit(cfg.modes[mi], layout, setup.partition, setup.drivers, spec,
                                       unpack_params(o.result.params, setup.partition));
                built = true;
            }
            NoiseModel noise;
            noise.two_qubit_error_rate = rate;
            noise.single_qubit_error_rate = cfg.single_qubit_error_rate;
            noise.trajectories = cfg.trajectories;
            noise.seed = Rng({cfg.seed, 3, static_cast<uint64_t>(inst), static_cast<uint64_t>(mi),
                              static_cast<uint64_t>(ri)})
                             .next();
            auto ex = noisy_expectations(circuit, spec, noise);
            o.residual_energy.push_back(residual_energy(ex.energy, o.result.e_min, o.result.e_max));
            o.fidelity.push_back(ex.ground_population);
        }
        out.outcomes[task] = std::move(o);
    });
    for (std::size_t mi = 0; mi < n_modes; mi++) {
        for (std::size_t ri = 0; ri < cfg.noise_rates.size(); ri++) {
            std::vector<double> eres, fid;
            for (std::size_t inst = 0; inst < cfg.instances; inst++) {
                const auto &o = out.outcomes[mi * cfg.instances + inst];
                eres.push_back(o.residual_energy[ri]);
                fid.push_back(o.fidelity[ri]);
            }
            EnsembleRow row;
            row.mode = cfg.modes[mi];
            row.n_r = setups[mi].partition.ratio();
            row.noise_rate = cfg.noise_rates[ri];
            row.median_eres = percentile(eres, 50);
            row.q25_eres = percentile(eres, 25);
            row.q75_eres = percentile(eres, 75);
            row.median_fidelity = percentile(fid, 50);
            row.q25_fidelity = percentile(fid, 25);
            row.q75_fidelity = percentile(fid, 75);
            row.instances = cfg.instances;
            out.rows.push_back(row);
        }
    }
    return out;
}

inline std::string results_csv(const std::vector<EnsembleRow> &rows) {
    std::ostringstream out;
    out << "mode,n_r,noise_rate,median_eres,q25_eres,q75_eres,median_fidelity,q25_fidelity,q75_fidelity,instances\n";
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    for (const auto &r : rows) {
        out << to_string(r.mode) << ',' << num(r.n_r) << ',' << num(r.noise_rate) << ',' << num(r.median_eres) << ','
            << num(r.q25_eres) << ',' << num(r.q75_eres) << ',' << num(r.median_fidelity) << ','
            << num(r.q25_fidelity) << ',' << num(r.q75_fidelity) << ',' << r.instances << '\n';
    }
    return out.str();
}

}  // namespace parity_qaoa
