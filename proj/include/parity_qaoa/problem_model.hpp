#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "parity_qaoa/errors.hpp"
#include "parity_qaoa/gf2.hpp"

namespace parity_qaoa {

struct SpinTerm {
    std::vector<int> spins;  // sorted, duplicate-free
    double coefficient = 0.0;
};

/// Logical spin Hamiltonian: a sum of coefficient * product of spins over index sets.
class SpinProblem {
   public:
    static SpinProblem create(int n_spins, std::vector<SpinTerm> terms) {
        if (n_spins < 1) {
            throw InvalidArgument("spin problem needs at least one spin");
        }
        if (terms.empty()) {
            throw InvalidArgument("spin problem needs at least one term");
        }
        std::set<std::vector<int>> seen;
        for (auto &t : terms) {
            if (t.spins.empty()) {
                throw InvalidArgument("spin term with empty index set");
            }
            std::sort(t.spins.begin(), t.spins.end());
            if (std::adjacent_find(t.spins.begin(), t.spins.end()) != t.spins.end()) {
                throw InvalidArgument("spin term repeats a spin index");
            }
            if (t.spins.front() < 0 || t.spins.back() >= n_spins) {
                throw InvalidArgument("spin index out of range");
            }
            if (!seen.insert(t.spins).second) {
                throw InvalidArgument("two spin terms share the same index set");
            }
        }
        SpinProblem p;
        p.n_spins_ = n_spins;
        p.terms_ = std::move(terms);
        return p;
    }

    int n_spins() const {
        return n_spins_;
    }
    const std::vector<SpinTerm> &terms() const {
        return terms_;
    }

    double energy(std::span<const int> spins) const {
        double e = 0;
        for (const auto &t : terms_) {
            int s = 1;
            for (int i : t.spins) {
                s *= spins[static_cast<std::size_t>(i)];
            }
            e += t.coefficient * s;
        }
        return e;
    }

   private:
    int n_spins_ = 0;
    std::vector<SpinTerm> terms_;
};

/// n_s: number of independent spin-flip symmetries, N - rank_GF2(term incidence).
inline int count_symmetries(const SpinProblem &problem) {
    auto n = static_cast<std::size_t>(problem.n_spins());
    std::vector<gf2::BitVector> rows;
    rows.reserve(problem.terms().size());
    for (const auto &t : problem.terms()) {
        rows.push_back(gf2::BitVector::from_indices(n, t.spins));
    }
    return problem.n_spins() - static_cast<int>(gf2::rank(std::move(rows)));
}

struct GridPos {
    int row = 0;
    int col = 0;
    auto operator<=>(const GridPos &) const = default;
};

enum class ConstraintKind { three_body, four_body };

struct Qubit {
    int id = 0;
    std::vector<int> label;
    GridPos pos;
    double coefficient = 0.0;
};

struct Constraint {
    int id = 0;
    std::vector<int> qubits;  // sorted ascending
    ConstraintKind kind = ConstraintKind::four_body;
};

enum class LayoutErrorCode {
    parse_error,
    bad_id,
    bad_label,
    duplicate_label,
    overlapping_position,
    unknown_qubit,
    kind_mismatch,
    not_a_plaquette,
    parity_violation,
};

inline const char *to_string(LayoutErrorCode c) {
    switch (c) {
        case LayoutErrorCode::parse_error:
            return "parse-error";
        case LayoutErrorCode::bad_id:
            return "bad-id";
        case LayoutErrorCode::bad_label:
            return "bad-label";
        case LayoutErrorCode::duplicate_label:
            return "duplicate-label";
        case LayoutErrorCode::overlapping_position:
            return "overlapping-position";
        case LayoutErrorCode::unknown_qubit:
            return "unknown-qubit";
        case LayoutErrorCode::kind_mismatch:
            return "kind-mismatch";
        case LayoutErrorCode::not_a_plaquette:
            return "not-a-plaquette";
        case LayoutErrorCode::parity_violation:
            return "parity-violation";
    }
    return "unknown";
}

class LayoutError : public ValidationError {
   public:
    LayoutError(LayoutErrorCode code, const std::string &what)
        : ValidationError(std::string(to_string(code)) + ": " + what), code_(code) {
    }
    LayoutErrorCode code() const {
        return code_;
    }

   private:
    LayoutErrorCode code_;
};

/// Grid-placed parity qubits plus 3/4-body plaquette constraints.
///
/// Qubit and constraint ids are dense (0..K-1, 0..n-1) and index the vectors
/// directly. Two qubits are adjacent when they are grid nearest neighbours, or
/// when they sit diagonally across the empty corner of a shared three-body
/// plaquette.
class ParityLayout {
   public:
    static ParityLayout create(std::vector<Qubit> qubits, std::vector<Constraint> constraints) {
        ParityLayout l;
        std::sort(qubits.begin(), qubits.end(), [](const Qubit &a, const Qubit &b) { return a.id < b.id; });
        std::sort(constraints.begin(), constraints.end(), [](const Constraint &a, const Constraint &b) {
            return a.id < b.id;
        });
        if (qubits.empty()) {
            throw LayoutError(LayoutErrorCode::bad_id, "layout has no qubits");
        }
        std::set<std::vector<int>> labels;
        for (std::size_t i = 0; i < qubits.size(); i++) {
            auto &q = qubits[i];
            if (q.id != static_cast<int>(i)) {
                throw LayoutError(LayoutErrorCode::bad_id, "qubit ids must be 0..K-1 without gaps (got " +
                                                               std::to_string(q.id) + ")");
            }
            std::sort(q.label.begin(), q.label.end());
            if (q.label.empty() || q.label.front() < 0 ||
                std::adjacent_find(q.label.begin(), q.label.end()) != q.label.end()) {
                throw LayoutError(LayoutErrorCode::bad_label,
                                  "qubit " + std::to_string(q.id) + " label must be non-empty distinct spin indices");
            }
            if (!labels.insert(q.label).second) {
                throw LayoutError(LayoutErrorCode::duplicate_label,
                                  "qubit " + std::to_string(q.id) + " repeats another qubit's label");
            }
            if (!l.by_pos_.emplace(q.pos, q.id).second) {
                throw LayoutError(LayoutErrorCode::overlapping_position,
                                  "qubit " + std::to_string(q.id) + " at (" + std::to_string(q.pos.row) + "," +
                                      std::to_string(q.pos.col) + ") overlaps qubit " +
                                      std::to_string(l.by_pos_.at(q.pos)));
            }
        }
        for (std::size_t i = 0; i < constraints.size(); i++) {
            auto &c = constraints[i];
            std::string name = "constraint " + std::to_string(c.id);
            if (c.id != static_cast<int>(i)) {
                throw LayoutError(LayoutErrorCode::bad_id, "constraint ids must be 0..n-1 without gaps");
            }
            std::sort(c.qubits.begin(), c.qubits.end());
            if (std::adjacent_find(c.qubits.begin(), c.qubits.end()) != c.qubits.end()) {
                throw LayoutError(LayoutErrorCode::unknown_qubit, name + " repeats a qubit");
            }
            for (int q : c.qubits) {
                if (q < 0 || q >= static_cast<int>(qubits.size())) {
                    throw LayoutError(LayoutErrorCode::unknown_qubit,
                                      name + " references unknown qubit " + std::to_string(q));
                }
            }
            std::size_t arity = c.kind == ConstraintKind::three_body ? 3 : 4;
            if (c.qubits.size() != arity) {
                throw LayoutError(LayoutErrorCode::kind_mismatch,
                                  name + " has " + std::to_string(c.qubits.size()) + " qubits for its kind");
            }
            int r0 = qubits[c.qubits[0]].pos.row, r1 = r0, c0 = qubits[c.qubits[0]].pos.col, c1 = c0;
            for (int q : c.qubits) {
                r0 = std::min(r0, qubits[q].pos.row);
                r1 = std::max(r1, qubits[q].pos.row);
                c0 = std::min(c0, qubits[q].pos.col);
                c1 = std::max(c1, qubits[q].pos.col);
            }
            if (r1 - r0 != 1 || c1 - c0 != 1) {
                throw LayoutError(LayoutErrorCode::not_a_plaquette, name + " does not lie on a 2x2 plaquette");
            }
            std::map<int, int> counts;
            for (int q : c.qubits) {
                for (int s : qubits[q].label) {
                    counts[s]++;
                }
            }
            for (auto [s, n] : counts) {
                if (n % 2) {
                    throw LayoutError(LayoutErrorCode::parity_violation,
                                      name + ": spin " + std::to_string(s) + " appears an odd number of times");
                }
            }
        }
        l.qubits_ = std::move(qubits);
        l.constraints_ = std::move(constraints);
        l.index();
        return l;
    }

    std::size_t qubit_count() const {
        return qubits_.size();
    }
    const std::vector<Qubit> &qubits() const {
        return qubits_;
    }
    const Qubit &qubit(int id) const {
        return qubits_[static_cast<std::size_t>(id)];
    }
    const std::vector<Constraint> &constraints() const {
        return constraints_;
    }
    const Constraint &constraint(int id) const {
        return constraints_[static_cast<std::size_t>(id)];
    }
    /// Qubit id at a grid point, or -1.
    int qubit_at(GridPos p) const {
        auto it = by_pos_.find(p);
        return it == by_pos_.end() ? -1 : it->second;
    }
    const std::vector<int> &constraints_of(int qubit) const {
        return constraints_of_[static_cast<std::size_t>(qubit)];
    }
    const std::vector<int> &neighbors(int qubit) const {
        return neighbors_[static_cast<std::size_t>(qubit)];
    }
    bool adjacent(int a, int b) const {
        const auto &n = neighbors(a);
        return std::binary_search(n.begin(), n.end(), b);
    }
    /// Top-left corner of a constraint's 2x2 plaquette.
    GridPos plaquette_origin(int constraint_id) const {
        GridPos o{1 << 30, 1 << 30};
        for (int q : constraint(constraint_id).qubits) {
            o.row = std::min(o.row, qubit(q).pos.row);
            o.col = std::min(o.col, qubit(q).pos.col);
        }
        return o;
    }
    /// Constraint id whose plaquette has the given origin, or -1.
    int constraint_at(GridPos origin) const {
        auto it = constraint_by_origin_.find(origin);
        return it == constraint_by_origin_.end() ? -1 : it->second;
    }
    int n_spins() const {
        int n = 0;
        for (const auto &q : qubits_) {
            n = std::max(n, q.label.back() + 1);
        }
        return n;
    }
    SpinProblem spin_problem() const {
        std::vector<SpinTerm> terms;
        terms.reserve(qubits_.size());
        for (const auto &q : qubits_) {
            terms.push_back({q.label, q.coefficient});
        }
        return SpinProblem::create(n_spins(), std::move(terms));
    }
    ParityLayout with_coefficients(std::span<const double> coefficients) const {
        if (coefficients.size() != qubits_.size()) {
            throw InvalidArgument("coefficient count does not match qubit count");
        }
        ParityLayout copy = *this;
        for (std::size_t i = 0; i < coefficients.size(); i++) {
            copy.qubits_[i].coefficient = coefficients[i];
        }
        return copy;
    }
    bool operator==(const ParityLayout &other) const {
        if (qubits_.size() != other.qubits_.size() || constraints_.size() != other.constraints_.size()) {
            return false;
        }
        for (std::size_t i = 0; i < qubits_.size(); i++) {
            const auto &a = qubits_[i];
            const auto &b = other.qubits_[i];
            if (a.label != b.label || a.pos != b.pos || a.coefficient != b.coefficient) {
                return false;
            }
        }
        for (std::size_t i = 0; i < constraints_.size(); i++) {
            if (constraints_[i].qubits != other.constraints_[i].qubits ||
                constraints_[i].kind != other.constraints_[i].kind) {
                return false;
            }
        }
        return true;
    }

   private:
    void index() {
        constraints_of_.assign(qubits_.size(), {});
        neighbors_.assign(qubits_.size(), {});
        for (const auto &c : constraints_) {
            for (int q : c.qubits) {
                constraints_of_[static_cast<std::size_t>(q)].push_back(c.id);
            }
            constraint_by_origin_.emplace(plaquette_origin(c.id), c.id);
        }
        for (const auto &q : qubits_) {
            for (auto [dr, dc] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
                int other = qubit_at({q.pos.row + dr, q.pos.col + dc});
                if (other >= 0) {
                    neighbors_[static_cast<std::size_t>(q.id)].push_back(other);
                }
            }
        }
        for (const auto &c : constraints_) {
            if (c.kind != ConstraintKind::three_body) {
                continue;
            }
            for (int a : c.qubits) {
                for (int b : c.qubits) {
                    const auto &pa = qubit(a).pos;
                    const auto &pb = qubit(b).pos;
                    if (pa.row != pb.row && pa.col != pb.col) {
                        neighbors_[static_cast<std::size_t>(a)].push_back(b);
                    }
                }
            }
        }
        for (auto &n : neighbors_) {
            std::sort(n.begin(), n.end());
            n.erase(std::unique(n.begin(), n.end()), n.end());
        }
    }

    std::vector<Qubit> qubits_;
    std::vector<Constraint> constraints_;
    std::map<GridPos, int> by_pos_;
    std::map<GridPos, int> constraint_by_origin_;
    std::vector<std::vector<int>> constraints_of_;
    std::vector<std::vector<int>> neighbors_;
};

/// Standard parity layout of the complete graph on n_spins spins.
///
/// Qubit (i, j), i < j, sits at grid (row i, col j - 1), so the layout is a
/// staircase triangle. Plaquettes whose top-left cell is (r, c) with c >= r
/// carry constraints: c == r is the three-body triangle along the staircase
/// edge, c > r is four-body. Qubit ids are row-major; constraint ids follow
/// plaquette origins row-major.
inline ParityLayout generate_complete_layout(int n_spins, std::span<const double> coefficients = {}) {
    if (n_spins < 2) {
        throw InvalidArgument("complete layout needs at least 2 spins");
    }
    std::vector<Qubit> qubits;
    std::map<std::pair<int, int>, int> id_of;
    for (int i = 0; i < n_spins - 1; i++) {
        for (int j = i + 1; j < n_spins; j++) {
            int id = static_cast<int>(qubits.size());
            id_of[{i, j - 1}] = id;
            qubits.push_back({id, {i, j}, {i, j - 1}, 0.0});
        }
    }
    if (!coefficients.empty()) {
        if (coefficients.size() != qubits.size()) {
            throw InvalidArgument("coefficient count does not match n(n-1)/2");
        }
        for (std::size_t k = 0; k < qubits.size(); k++) {
            qubits[k].coefficient = coefficients[k];
        }
    }
    std::vector<Constraint> constraints;
    for (int r = 0; r + 2 < n_spins; r++) {
        for (int c = r; c + 2 < n_spins; c++) {
            Constraint con;
            con.id = static_cast<int>(constraints.size());
            if (c == r) {
                con.kind = ConstraintKind::three_body;
                con.qubits = {id_of.at({r, c}), id_of.at({r, c + 1}), id_of.at({r + 1, c + 1})};
            } else {
                con.kind = ConstraintKind::four_body;
                con.qubits = {id_of.at({r, c}), id_of.at({r, c + 1}), id_of.at({r + 1, c}), id_of.at({r + 1, c + 1})};
            }
            std::sort(con.qubits.begin(), con.qubits.end());
            constraints.push_back(std::move(con));
        }
    }
    return ParityLayout::create(std::move(qubits), std::move(constraints));
}

inline nlohmann::json layout_to_json(const ParityLayout &layout) {
    nlohmann::json qs = nlohmann::json::array();
    for (const auto &q : layout.qubits()) {
        qs.push_back({{"id", q.id}, {"label", q.label}, {"row", q.pos.row}, {"col", q.pos.col},
                      {"coefficient", q.coefficient}});
    }
    nlohmann::json cs = nlohmann::json::array();
    for (const auto &c : layout.constraints()) {
        cs.push_back({{"id", c.id}, {"qubits", c.qubits},
                      {"kind", c.kind == ConstraintKind::three_body ? "three" : "four"}});
    }
    return {{"qubits", qs}, {"constraints", cs}};
}

inline std::string serialize_layout(const ParityLayout &layout) {
    return layout_to_json(layout).dump(2) + "\n";
}

inline ParityLayout load_layout(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw LayoutError(LayoutErrorCode::parse_error, e.what());
    }
    std::vector<Qubit> qubits;
    std::vector<Constraint> constraints;
    try {
        for (const auto &q : doc.at("qubits")) {
            Qubit out;
            out.id = q.at("id").get<int>();
            out.label = q.at("label").get<std::vector<int>>();
            out.pos = {q.at("row").get<int>(), q.at("col").get<int>()};
            out.coefficient = q.at("coefficient").get<double>();
            qubits.push_back(std::move(out));
        }
        for (const auto &c : doc.at("constraints")) {
            Constraint out;
            out.id = c.at("id").get<int>();
            out.qubits = c.at("qubits").get<std::vector<int>>();
            auto kind = c.at("kind").get<std::string>();
            if (kind == "three") {
                out.kind = ConstraintKind::three_body;
            } else if (kind == "four") {
                out.kind = ConstraintKind::four_body;
            } else {
                throw LayoutError(LayoutErrorCode::parse_error,
                                  "constraint " + std::to_string(out.id) + " has unknown kind '" + kind + "'");
            }
            constraints.push_back(std::move(out));
        }
    } catch (const nlohmann::json::exception &e) {
        throw LayoutError(LayoutErrorCode::parse_error, e.what());
    }
    return ParityLayout::create(std::move(qubits), std::move(constraints));
}

struct ConstraintTerm {
    int constraint_id = 0;
    std::vector<int> qubits;
    double strength = 1.0;
};

/// Local-field and constraint parts of the physical Hamiltonian.
struct HamiltonianSpec {
    std::vector<double> z_terms;  // indexed by qubit id
    std::vector<ConstraintTerm> constraint_terms;  // indexed by constraint id
    int symmetry_count = 0;

    std::size_t qubit_count() const {
        return z_terms.size();
    }
};

inline HamiltonianSpec build_hamiltonians(const ParityLayout &layout, double constraint_strength = 1.0) {
    if (!(constraint_strength > 0)) {
        throw InvalidArgument("constraint strength must be positive");
    }
    HamiltonianSpec h;
    for (const auto &q : layout.qubits()) {
        h.z_terms.push_back(q.coefficient);
    }
    for (const auto &c : layout.constraints()) {
        h.constraint_terms.push_back({c.id, c.qubits, constraint_strength});
    }
    h.symmetry_count = count_symmetries(layout.spin_problem());
    return h;
}

inline uint64_t qubit_mask(std::span<const int> qubits) {
    uint64_t m = 0;
    for (int q : qubits) {
        m |= uint64_t{1} << q;
    }
    return m;
}

constexpr std::size_t default_enumeration_cap = 24;

/// All K-bit strings (bit m set = qubit m down) with even down-parity on every listed constraint.
inline std::vector<uint64_t> enumerate_codespace(const ParityLayout &layout, std::span<const int> implicit_constraints,
                                                 std::size_t cap = default_enumeration_cap) {
    std::size_t k = layout.qubit_count();
    if (k > cap || k > 62) {
        throw ResourceLimitError("codespace enumeration over " + std::to_string(k) + " qubits exceeds cap " +
                                 std::to_string(cap));
    }
    std::vector<uint64_t> masks;
    for (int id : implicit_constraints) {
        masks.push_back(qubit_mask(layout.constraint(id).qubits));
    }
    std::vector<uint64_t> out;
    for (uint64_t z = 0; z < (uint64_t{1} << k); z++) {
        bool ok = true;
        for (uint64_t m : masks) {
            if (std::popcount(z & m) & 1) {
                ok = false;
                break;
            }
        }
        if (ok) {
            out.push_back(z);
        }
    }
    return out;
}

}  // namespace parity_qaoa
