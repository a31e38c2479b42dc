#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "parity_qaoa/parity_qaoa.hpp"

// Reference implementations used only by the tests. They share no code with the
// library beyond its data types.
namespace oracle {

namespace pq = parity_qaoa;
using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Unitary of a circuit restricted to `qubits` (local bit i = qubits[i]; bit set = down).
inline Mat circuit_unitary(const pq::Circuit &c, const std::vector<int> &qubits) {
    std::map<int, int> local;
    for (std::size_t i = 0; i < qubits.size(); i++) {
        local[qubits[i]] = static_cast<int>(i);
    }
    const std::size_t dim = std::size_t{1} << qubits.size();
    Mat u = Mat::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const cplx i1(0, 1);
    for (const auto &g : c.gates()) {
        Eigen::Matrix2cd m;
        switch (g.kind) {
            case pq::GateKind::H:
                m << 1, 1, 1, -1;
                m /= std::sqrt(2.0);
                break;
            case pq::GateKind::RX:
                m << std::cos(g.angle / 2), -i1 * std::sin(g.angle / 2), -i1 * std::sin(g.angle / 2),
                    std::cos(g.angle / 2);
                break;
            case pq::GateKind::RZ:
                m << std::exp(-i1 * g.angle / 2.0), 0, 0, std::exp(i1 * g.angle / 2.0);
                break;
            case pq::GateKind::CNOT: {
                std::size_t cm = std::size_t{1} << local.at(g.q0), tm = std::size_t{1} << local.at(g.q1);
                Mat next = u;
                for (std::size_t r = 0; r < dim; r++) {
                    std::size_t src = (r & cm) ? (r ^ tm) : r;
                    next.row(static_cast<Eigen::Index>(r)) = u.row(static_cast<Eigen::Index>(src));
                }
                u = next;
                continue;
            }
        }
        std::size_t bm = std::size_t{1} << local.at(g.q0);
        Mat next = u;
        for (std::size_t r = 0; r < dim; r++) {
            int bit = (r & bm) ? 1 : 0;
            auto r0 = static_cast<Eigen::Index>(r & ~bm), r1 = static_cast<Eigen::Index>(r | bm);
            next.row(static_cast<Eigen::Index>(r)) = m(bit, 0) * u.row(r0) + m(bit, 1) * u.row(r1);
        }
        u = next;
    }
    return u;
}

/// Tensor product of X on the masked local qubits.
inline Mat x_string(std::size_t n, uint64_t mask) {
    std::size_t dim = std::size_t{1} << n;
    Mat m = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t z = 0; z < dim; z++) {
        m(static_cast<Eigen::Index>(z ^ mask), static_cast<Eigen::Index>(z)) = 1;
    }
    return m;
}

inline Mat diagonal(const std::vector<double> &d) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); i++) {
        v(static_cast<Eigen::Index>(i)) = d[i];
    }
    return v.asDiagonal();
}

/// exp(-i t H) by dense matrix exponential.
inline Mat evolve(const Mat &h, double t) {
    Mat a = cplx(0, -t) * h;
    return a.exp();
}

/// max |u - e^{i phi} v| over entries, with phi fitted from the trace.
inline double phase_distance(const Mat &u, const Mat &v) {
    cplx t = (v.adjoint() * u).trace();
    cplx phase = std::abs(t) > 1e-300 ? t / std::abs(t) : cplx(1);
    return (u - phase * v).cwiseAbs().maxCoeff();
}

/// Diagonal of H_phys: sum_m J_m (1 - 2 z_m) + sum_l c_l [odd parity of z on C_l].
inline double phys_energy(const pq::ParityLayout &layout, double strength, uint64_t z) {
    double e = 0;
    for (const auto &q : layout.qubits()) {
        e += q.coefficient * (((z >> q.id) & 1) ? -1.0 : 1.0);
    }
    for (const auto &c : layout.constraints()) {
        int parity = 0;
        for (int q : c.qubits) {
            parity ^= static_cast<int>((z >> q) & 1);
        }
        e += strength * parity;
    }
    return e;
}

/// Number of spin-flip sets leaving every term invariant, as log2.
inline int brute_symmetries(const pq::SpinProblem &p) {
    int n = p.n_spins();
    int count = 0;
    for (uint64_t s = 0; s < (uint64_t{1} << n); s++) {
        bool ok = true;
        for (const auto &t : p.terms()) {
            int hits = 0;
            for (int i : t.spins) {
                hits += static_cast<int>((s >> i) & 1);
            }
            ok &= hits % 2 == 0;
        }
        count += ok;
    }
    return std::countr_zero(static_cast<unsigned>(count));
}

/// States z with even parity on every listed constraint, by direct parity counting.
inline std::set<uint64_t> codespace(const pq::ParityLayout &layout, const std::vector<int> &constraints) {
    std::set<uint64_t> out;
    for (uint64_t z = 0; z < (uint64_t{1} << layout.qubit_count()); z++) {
        bool ok = true;
        for (int c : constraints) {
            int parity = 0;
            for (int q : layout.constraint(c).qubits) {
                parity ^= static_cast<int>((z >> q) & 1);
            }
            ok &= parity == 0;
        }
        if (ok) {
            out.insert(z);
        }
    }
    return out;
}

/// Grid patch where cell (r, c) carries label {row_spin[r], col_spin[c]}; equal spins leave a hole.
/// Every plaquette with three or four occupied cells becomes a constraint.
inline pq::ParityLayout grid_patch(const std::vector<int> &row_spin, const std::vector<int> &col_spin) {
    std::vector<pq::Qubit> qubits;
    std::map<std::pair<int, int>, int> at;
    for (int r = 0; r < static_cast<int>(row_spin.size()); r++) {
        for (int c = 0; c < static_cast<int>(col_spin.size()); c++) {
            if (row_spin[static_cast<std::size_t>(r)] == col_spin[static_cast<std::size_t>(c)]) {
                continue;
            }
            int id = static_cast<int>(qubits.size());
            at[{r, c}] = id;
            qubits.push_back({id, {row_spin[static_cast<std::size_t>(r)], col_spin[static_cast<std::size_t>(c)]},
                              {r, c}, 0.0});
        }
    }
    std::vector<pq::Constraint> constraints;
    for (int r = 0; r + 1 < static_cast<int>(row_spin.size()); r++) {
        for (int c = 0; c + 1 < static_cast<int>(col_spin.size()); c++) {
            std::vector<int> cells;
            for (auto p : {std::pair{r, c}, {r, c + 1}, {r + 1, c}, {r + 1, c + 1}}) {
                if (at.count(p)) {
                    cells.push_back(at.at(p));
                }
            }
            if (cells.size() >= 3) {
                pq::Constraint con;
                con.id = static_cast<int>(constraints.size());
                con.qubits = cells;
                con.kind = cells.size() == 3 ? pq::ConstraintKind::three_body : pq::ConstraintKind::four_body;
                constraints.push_back(con);
            }
        }
    }
    return pq::ParityLayout::create(std::move(qubits), std::move(constraints));
}

/// Plaquette origin of a constraint, recomputed from qubit positions.
inline std::pair<int, int> origin(const pq::ParityLayout &layout, int cid) {
    int r = 1 << 30, c = 1 << 30;
    for (int q : layout.constraint(cid).qubits) {
        r = std::min(r, layout.qubit(q).pos.row);
        c = std::min(c, layout.qubit(q).pos.col);
    }
    return {r, c};
}

/// Edge-adjacency of constraint plaquettes.
inline std::vector<std::vector<int>> plaquette_graph(const pq::ParityLayout &layout) {
    std::map<std::pair<int, int>, int> by_origin;
    for (const auto &c : layout.constraints()) {
        by_origin[origin(layout, c.id)] = c.id;
    }
    std::vector<std::vector<int>> adj(layout.constraints().size());
    for (const auto &[o, id] : by_origin) {
        for (auto [dr, dc] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
            auto it = by_origin.find({o.first + dr, o.second + dc});
            if (it != by_origin.end()) {
                adj[static_cast<std::size_t>(id)].push_back(it->second);
            }
        }
    }
    return adj;
}

/// Fewest extra plaquettes needed to join `group` to a plaquette with fewer than four neighbours.
inline int distance_to_boundary(const pq::ParityLayout &layout, const std::vector<int> &group) {
    auto adj = plaquette_graph(layout);
    std::vector<int> dist(adj.size(), -1);
    std::deque<int> queue;
    for (int g : group) {
        dist[static_cast<std::size_t>(g)] = 0;
        queue.push_back(g);
    }
    while (!queue.empty()) {
        int c = queue.front();
        queue.pop_front();
        if (adj[static_cast<std::size_t>(c)].size() < 4) {
            return dist[static_cast<std::size_t>(c)];
        }
        for (int n : adj[static_cast<std::size_t>(c)]) {
            if (dist[static_cast<std::size_t>(n)] < 0) {
                dist[static_cast<std::size_t>(n)] = dist[static_cast<std::size_t>(c)] + 1;
                queue.push_back(n);
            }
        }
    }
    return -1;
}

/// Noiseless QAOA energy by direct state evolution over all 2^K amplitudes.
inline double qaoa_energy(const pq::ParityLayout &layout, const pq::ConstraintPartition &partition,
                          const pq::DriverSet &drivers, double strength, const std::vector<double> &params) {
    const std::size_t k = layout.qubit_count(), dim = std::size_t{1} << k;
    auto space = codespace(layout, partition.implicit_ids());
    std::vector<cplx> psi(dim, 0.0);
    for (uint64_t z : space) {
        psi[z] = 1.0 / std::sqrt(static_cast<double>(space.size()));
    }
    std::vector<double> field(dim), penalty(dim, 0.0);
    for (std::size_t z = 0; z < dim; z++) {
        for (const auto &q : layout.qubits()) {
            field[z] += q.coefficient * (((z >> q.id) & 1) ? -1.0 : 1.0);
        }
        for (int c : partition.explicit_ids()) {
            int parity = 0;
            for (int q : layout.constraint(c).qubits) {
                parity ^= static_cast<int>((z >> q) & 1);
            }
            penalty[z] += strength * parity;
        }
    }
    const std::size_t per = partition.n_explicit() > 0 ? 3 : 2;
    for (std::size_t at = 0; at < params.size(); at += per) {
        double omega = per == 3 ? params[at] : 0, gamma = params[at + per - 2], beta = params[at + per - 1];
        for (std::size_t z = 0; z < dim; z++) {
            psi[z] *= std::exp(cplx(0, -omega * penalty[z] - gamma * field[z]));
        }
        for (const auto &line : drivers.lines) {
            uint64_t mask = 0;
            for (int q : line.qubits) {
                mask |= uint64_t{1} << q;
            }
            std::vector<cplx> next(dim);
            for (std::size_t z = 0; z < dim; z++) {
                next[z] = std::cos(beta) * psi[z] - cplx(0, std::sin(beta)) * psi[z ^ mask];
            }
            psi = std::move(next);
        }
    }
    double e = 0;
    for (std::size_t z = 0; z < dim; z++) {
        e += std::norm(psi[z]) * phys_energy(layout, strength, z);
    }
    return e;
}

}  // namespace oracle
