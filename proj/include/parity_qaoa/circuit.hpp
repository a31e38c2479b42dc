#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "parity_qaoa/errors.hpp"

namespace parity_qaoa {

enum class GateKind { CNOT, RX, RZ, H };

struct Gate {
    GateKind kind = GateKind::H;
    int q0 = 0;       // target for single-qubit gates, control for CNOT
    int q1 = -1;      // CNOT target
    double angle = 0;

    static Gate cnot(int control, int target) {
        return {GateKind::CNOT, control, target, 0.0};
    }
    static Gate rx(int q, double angle) {
        return {GateKind::RX, q, -1, angle};
    }
    static Gate rz(int q, double angle) {
        return {GateKind::RZ, q, -1, angle};
    }
    static Gate h(int q) {
        return {GateKind::H, q, -1, 0.0};
    }

    bool two_qubit() const {
        return kind == GateKind::CNOT;
    }
    bool operator==(const Gate &) const = default;
};

class Circuit {
   public:
    Circuit() = default;
    explicit Circuit(std::size_t qubit_count) : qubit_count_(qubit_count) {
    }

    std::size_t qubit_count() const {
        return qubit_count_;
    }
    const std::vector<Gate> &gates() const {
        return gates_;
    }
    std::size_t size() const {
        return gates_.size();
    }
    bool empty() const {
        return gates_.empty();
    }

    Circuit &add(const Gate &g) {
        auto valid = [&](int q) { return q >= 0 && static_cast<std::size_t>(q) < qubit_count_; };
        if (!valid(g.q0) || (g.two_qubit() && !valid(g.q1))) {
            throw InvalidArgument("gate operand out of range");
        }
        if (g.two_qubit() && g.q0 == g.q1) {
            throw InvalidArgument("CNOT control equals target");
        }
        gates_.push_back(g);
        return *this;
    }
    Circuit &append(const Circuit &other) {
        if (other.qubit_count_ != qubit_count_) {
            throw InvalidArgument("circuit width mismatch");
        }
        gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
        return *this;
    }
    std::size_t count(GateKind kind) const {
        return static_cast<std::size_t>(
            std::count_if(gates_.begin(), gates_.end(), [&](const Gate &g) { return g.kind == kind; }));
    }

   private:
    std::size_t qubit_count_ = 0;
    std::vector<Gate> gates_;
};

/// ASAP layer of each gate: one past the latest earlier gate sharing an operand.
inline std::vector<std::size_t> schedule_layers(const Circuit &c) {
    std::vector<std::size_t> busy(c.qubit_count(), 0);
    std::vector<std::size_t> layer;
    layer.reserve(c.size());
    for (const auto &g : c.gates()) {
        std::size_t l = busy[static_cast<std::size_t>(g.q0)];
        if (g.two_qubit()) {
            l = std::max(l, busy[static_cast<std::size_t>(g.q1)]);
        }
        layer.push_back(l);
        busy[static_cast<std::size_t>(g.q0)] = l + 1;
        if (g.two_qubit()) {
            busy[static_cast<std::size_t>(g.q1)] = l + 1;
        }
    }
    return layer;
}

/// Scheduled depth; every gate costs one layer.
inline std::size_t schedule(const Circuit &c) {
    std::size_t depth = 0;
    for (auto l : schedule_layers(c)) {
        depth = std::max(depth, l + 1);
    }
    return depth;
}

inline std::string format_angle(double a) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", a);
    return buf;
}

inline std::string export_circuit(const Circuit &c) {
    std::ostringstream out;
    for (const auto &g : c.gates()) {
        switch (g.kind) {
            case GateKind::CNOT:
                out << "CNOT " << g.q0 << ' ' << g.q1 << '\n';
                break;
            case GateKind::RX:
                out << "RX " << g.q0 << ' ' << format_angle(g.angle) << '\n';
                break;
            case GateKind::RZ:
                out << "RZ " << g.q0 << ' ' << format_angle(g.angle) << '\n';
                break;
            case GateKind::H:
                out << "H " << g.q0 << '\n';
                break;
        }
    }
    return out.str();
}

namespace detail {

inline bool parse_gate(Circuit &c, const std::string &op, std::istringstream &ls) {
    int a = 0, b = 0;
    double angle = 0;
    bool ok = false;
    if (op == "CNOT") {
        ok = static_cast<bool>(ls >> a >> b);
        if (ok) {
            c.add(Gate::cnot(a, b));
        }
    } else if (op == "RX" || op == "RZ") {
        ok = static_cast<bool>(ls >> a >> angle);
        if (ok) {
            c.add(op == "RX" ? Gate::rx(a, angle) : Gate::rz(a, angle));
        }
    } else if (op == "H") {
        ok = static_cast<bool>(ls >> a);
        if (ok) {
            c.add(Gate::h(a));
        }
    }
    return ok;
}

}  // namespace detail

inline Circuit parse_circuit(const std::string &text, std::size_t qubit_count) {
    Circuit c(qubit_count);
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string op;
        ls >> op;
        bool ok = false;
        try {
            ok = detail::parse_gate(c, op, ls);
        } catch (const InvalidArgument &e) {
            throw ValidationError("circuit line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!ok) {
            throw ValidationError("circuit line " + std::to_string(lineno) + ": cannot parse '" + line + "'");
        }
    }
    return c;
}

}  // namespace parity_qaoa
