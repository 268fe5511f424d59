#include "leaksem/constraint.hpp"

#include <algorithm>
#include <set>

namespace leaksem {

namespace {

std::string flip(const std::string& op) {
    if (op == "==") return "!=";
    if (op == "!=") return "==";
    if (op == "<") return ">=";
    if (op == ">") return "<=";
    if (op == "<=") return ">";
    if (op == ">=") return "<";
    return op;
}

std::string sym_name(uint64_t sym, const std::map<uint64_t, std::string>& names) {
    auto it = names.find(sym);
    if (it != names.end()) return it->second;
    return "sym" + std::to_string(sym);
}

}  // namespace

Atom Atom::negated() const {
    Atom a = *this;
    switch (kind) {
        case Kind::IntCmp: a.op = flip(op); break;
        case Kind::StrEq: a.kind = Kind::StrNeq; break;
        case Kind::StrNeq: a.kind = Kind::StrEq; break;
        case Kind::IsNull: a.kind = Kind::NotNull; break;
        case Kind::NotNull: a.kind = Kind::IsNull; break;
        case Kind::BoolIs: a.boolVal = !boolVal; break;
    }
    return a;
}

std::string Atom::to_string(const std::map<uint64_t, std::string>& names) const {
    std::string s = sym_name(sym, names);
    switch (kind) {
        case Kind::IntCmp:
            return s + " " + op + " " +
                   (rhsIsSym ? sym_name(rhsSym, names) : std::to_string(bound));
        case Kind::StrEq: return s + " == \"" + strConst + "\"";
        case Kind::StrNeq: return s + " != \"" + strConst + "\"";
        case Kind::IsNull: return s + " == null";
        case Kind::NotNull: return s + " != null";
        case Kind::BoolIs: return s + (boolVal ? " == true" : " == false");
    }
    return "?";
}

std::string PathConstraint::to_string(const std::map<uint64_t, std::string>& names) const {
    if (conjuncts.empty()) return "true";
    std::string out;
    for (size_t i = 0; i < conjuncts.size(); ++i) {
        if (i) out += " && ";
        out += conjuncts[i].to_string(names);
    }
    return out;
}

namespace {

constexpr long long kLo = -4611686018427387904LL;
constexpr long long kHi = 4611686018427387904LL;

struct UnionFind {
    std::map<uint64_t, uint64_t> parent;
    uint64_t find(uint64_t x) {
        if (!parent.count(x)) parent[x] = x;
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(uint64_t a, uint64_t b) { parent[find(a)] = find(b); }
};

struct Interval {
    long long lo = kLo, hi = kHi;
    std::set<long long> excluded;  // from != constant

    bool empty() const {
        if (lo > hi) return true;
        if (lo == hi && excluded.count(lo)) return true;
        // A handful of excluded points can hollow out a small interval.
        if (hi - lo < 64) {
            for (long long v = lo; v <= hi; ++v)
                if (!excluded.count(v)) return false;
            return true;
        }
        return false;
    }
};

}  // namespace

Feasibility check_feasibility(const PathConstraint& pc) {
    UnionFind uf;
    for (const auto& a : pc.conjuncts)
        if (a.kind == Atom::Kind::IntCmp && a.rhsIsSym && a.op == "==")
            uf.unite(a.sym, a.rhsSym);

    std::map<uint64_t, Interval> ints;
    struct SymCmp { uint64_t a, b; std::string op; };
    std::vector<SymCmp> symCmps;

    struct StrInfo {
        std::set<std::string> eq, neq;
        bool mustNull = false, mustNotNull = false;
    };
    std::map<uint64_t, StrInfo> strs;
    std::map<uint64_t, int> bools;  // 0 unset, 1 true, 2 false, 3 conflict

    for (const auto& a : pc.conjuncts) {
        switch (a.kind) {
            case Atom::Kind::IntCmp: {
                if (a.rhsIsSym) {
                    if (a.op != "==")
                        symCmps.push_back({uf.find(a.sym), uf.find(a.rhsSym), a.op});
                    continue;
                }
                Interval& iv = ints[uf.find(a.sym)];
                if (a.op == "==") {
                    iv.lo = std::max(iv.lo, a.bound);
                    iv.hi = std::min(iv.hi, a.bound);
                } else if (a.op == "!=") {
                    iv.excluded.insert(a.bound);
                } else if (a.op == "<") {
                    iv.hi = std::min(iv.hi, a.bound - 1);
                } else if (a.op == "<=") {
                    iv.hi = std::min(iv.hi, a.bound);
                } else if (a.op == ">") {
                    iv.lo = std::max(iv.lo, a.bound + 1);
                } else if (a.op == ">=") {
                    iv.lo = std::max(iv.lo, a.bound);
                }
                break;
            }
            case Atom::Kind::StrEq: {
                auto& si = strs[a.sym];
                si.eq.insert(a.strConst);
                si.mustNotNull = true;
                break;
            }
            case Atom::Kind::StrNeq:
                strs[a.sym].neq.insert(a.strConst);
                break;
            case Atom::Kind::IsNull:
                strs[a.sym].mustNull = true;
                break;
            case Atom::Kind::NotNull:
                strs[a.sym].mustNotNull = true;
                break;
            case Atom::Kind::BoolIs: {
                int want = a.boolVal ? 1 : 2;
                int& cur = bools[a.sym];
                if (cur == 0) cur = want;
                else if (cur != want) cur = 3;
                break;
            }
        }
    }

    // Bound propagation for symbol-to-symbol comparisons, to a fixpoint.
    auto iv_of = [&](uint64_t s) -> Interval& { return ints[s]; };
    for (int round = 0; round < 64; ++round) {
        bool changed = false;
        for (const auto& c : symCmps) {
            Interval& A = iv_of(c.a);
            Interval& B = iv_of(c.b);
            auto tighten = [&](long long& slot, long long v, bool isMax) {
                if (isMax ? v > slot : v < slot) {
                    slot = v;
                    changed = true;
                }
            };
            if (c.op == "<") {
                tighten(A.hi, std::min(A.hi, B.hi - 1), false);
                tighten(B.lo, std::max(B.lo, A.lo + 1), true);
            } else if (c.op == "<=") {
                tighten(A.hi, std::min(A.hi, B.hi), false);
                tighten(B.lo, std::max(B.lo, A.lo), true);
            } else if (c.op == ">") {
                tighten(A.lo, std::max(A.lo, B.lo + 1), true);
                tighten(B.hi, std::min(B.hi, A.hi - 1), false);
            } else if (c.op == ">=") {
                tighten(A.lo, std::max(A.lo, B.lo), true);
                tighten(B.hi, std::min(B.hi, A.hi), false);
            }
        }
        if (!changed) break;
    }

    for (auto& [s, iv] : ints)
        if (iv.empty()) return Feasibility::Infeasible;

    for (const auto& c : symCmps) {
        if (c.op == "!=" && c.a == c.b) return Feasibility::Infeasible;
        if (c.op == "!=") {
            const Interval& A = ints[c.a];
            const Interval& B = ints[c.b];
            if (A.lo == A.hi && B.lo == B.hi && A.lo == B.lo)
                return Feasibility::Infeasible;
        }
        if ((c.op == "<" || c.op == ">") && c.a == c.b) return Feasibility::Infeasible;
    }

    for (const auto& [s, si] : strs) {
        if (si.eq.size() > 1) return Feasibility::Infeasible;
        if (si.mustNull && (si.mustNotNull || !si.eq.empty()))
            return Feasibility::Infeasible;
        if (!si.eq.empty() && si.neq.count(*si.eq.begin()))
            return Feasibility::Infeasible;
    }
    for (const auto& [s, v] : bools)
        if (v == 3) return Feasibility::Infeasible;

    return Feasibility::Feasible;
}

}  // namespace leaksem
