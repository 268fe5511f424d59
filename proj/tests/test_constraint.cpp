#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include "leaksem/constraint.hpp"

using namespace leaksem;

namespace {

Atom int_cmp(uint64_t sym, const std::string& op, long long bound) {
    Atom a{Atom::Kind::IntCmp, sym, op, bound};
    return a;
}

Atom sym_eq(uint64_t a, uint64_t b) {
    Atom at{Atom::Kind::IntCmp, a, "=="};
    at.rhsIsSym = true;
    at.rhsSym = b;
    return at;
}

Atom str_eq(uint64_t sym, const std::string& s) {
    Atom a{Atom::Kind::StrEq, sym};
    a.strConst = s;
    return a;
}

Atom str_neq(uint64_t sym, const std::string& s) {
    Atom a{Atom::Kind::StrNeq, sym};
    a.strConst = s;
    return a;
}

// ---- brute-force oracle ----

bool int_atom_holds(const Atom& a, const std::map<uint64_t, long long>& env) {
    long long l = env.at(a.sym);
    long long r = a.rhsIsSym ? env.at(a.rhsSym) : a.bound;
    if (a.op == "==") return l == r;
    if (a.op == "!=") return l != r;
    if (a.op == "<") return l < r;
    if (a.op == ">") return l > r;
    if (a.op == "<=") return l <= r;
    return l >= r;
}

// Enumerates int symbols over [-64, 64]; strings over the constants mentioned
// plus null and a fresh value; booleans over {true, false}.
Feasibility brute_force(const PathConstraint& pc) {
    std::vector<uint64_t> intSyms, strSyms, boolSyms;
    std::vector<std::string> strConsts;
    auto note = [](std::vector<uint64_t>& v, uint64_t s) {
        if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
    };
    for (const auto& a : pc.conjuncts) {
        switch (a.kind) {
            case Atom::Kind::IntCmp:
                note(intSyms, a.sym);
                if (a.rhsIsSym) note(intSyms, a.rhsSym);
                break;
            case Atom::Kind::StrEq:
            case Atom::Kind::StrNeq:
                note(strSyms, a.sym);
                strConsts.push_back(a.strConst);
                break;
            case Atom::Kind::IsNull:
            case Atom::Kind::NotNull:
                note(strSyms, a.sym);
                break;
            case Atom::Kind::BoolIs:
                note(boolSyms, a.sym);
                break;
        }
    }
    std::sort(strConsts.begin(), strConsts.end());
    strConsts.erase(std::unique(strConsts.begin(), strConsts.end()), strConsts.end());
    // index len(strConsts) = null, +1 = a value never mentioned
    size_t strDomain = strConsts.size() + 2;

    std::map<uint64_t, long long> intEnv;
    std::map<uint64_t, size_t> strEnv;
    std::map<uint64_t, bool> boolEnv;

    std::function<bool(size_t)> tryBool = [&](size_t bi) -> bool {
        if (bi == boolSyms.size()) {
            for (const auto& a : pc.conjuncts) {
                switch (a.kind) {
                    case Atom::Kind::IntCmp:
                        if (!int_atom_holds(a, intEnv)) return false;
                        break;
                    case Atom::Kind::StrEq: {
                        size_t v = strEnv.at(a.sym);
                        if (v >= strConsts.size() || strConsts[v] != a.strConst)
                            return false;
                        break;
                    }
                    case Atom::Kind::StrNeq: {
                        // null != const holds: the language compares null unequal
                        // to every concrete string.
                        size_t v = strEnv.at(a.sym);
                        if (v < strConsts.size() && strConsts[v] == a.strConst)
                            return false;
                        break;
                    }
                    case Atom::Kind::IsNull:
                        if (strEnv.at(a.sym) != strConsts.size()) return false;
                        break;
                    case Atom::Kind::NotNull:
                        if (strEnv.at(a.sym) == strConsts.size()) return false;
                        break;
                    case Atom::Kind::BoolIs:
                        if (boolEnv.at(a.sym) != a.boolVal) return false;
                        break;
                }
            }
            return true;
        }
        for (bool v : {false, true}) {
            boolEnv[boolSyms[bi]] = v;
            if (tryBool(bi + 1)) return true;
        }
        return false;
    };
    std::function<bool(size_t)> tryStr = [&](size_t si) -> bool {
        if (si == strSyms.size()) return tryBool(0);
        for (size_t v = 0; v < strDomain; ++v) {
            strEnv[strSyms[si]] = v;
            if (tryStr(si + 1)) return true;
        }
        return false;
    };
    std::function<bool(size_t)> tryInt = [&](size_t ii) -> bool {
        if (ii == intSyms.size()) return tryStr(0);
        for (long long v = -64; v <= 64; ++v) {
            intEnv[intSyms[ii]] = v;
            if (tryInt(ii + 1)) return true;
        }
        return false;
    };
    return tryInt(0) ? Feasibility::Feasible : Feasibility::Infeasible;
}

PathConstraint pcof(std::vector<Atom> atoms) {
    PathConstraint pc;
    pc.conjuncts = std::move(atoms);
    return pc;
}

}  // namespace

TEST_CASE("loop-counter guards: pinned feasibility examples") {
    CHECK(check_feasibility(pcof({int_cmp(1, ">", 3), int_cmp(1, "<", 10)})) ==
          Feasibility::Feasible);
    CHECK(check_feasibility(pcof({int_cmp(1, ">", 3), int_cmp(1, "<", 2)})) ==
          Feasibility::Infeasible);
}

TEST_CASE("string equality vs null tests") {
    Atom isNull{Atom::Kind::IsNull, 7};
    Atom notNull{Atom::Kind::NotNull, 7};
    CHECK(check_feasibility(pcof({isNull, notNull})) == Feasibility::Infeasible);
    CHECK(check_feasibility(pcof({isNull, str_eq(7, "x")})) == Feasibility::Infeasible);
    CHECK(check_feasibility(pcof({str_eq(7, "a"), str_eq(7, "b")})) ==
          Feasibility::Infeasible);
    CHECK(check_feasibility(pcof({str_eq(7, "a"), str_neq(7, "a")})) ==
          Feasibility::Infeasible);
    CHECK(check_feasibility(pcof({str_eq(7, "a"), str_neq(7, "b")})) ==
          Feasibility::Feasible);
    CHECK(check_feasibility(pcof({str_neq(7, "a"), str_neq(7, "b")})) ==
          Feasibility::Feasible);
}

TEST_CASE("boolean polarity conflicts") {
    Atom t{Atom::Kind::BoolIs, 3};
    t.boolVal = true;
    Atom f = t.negated();
    CHECK(check_feasibility(pcof({t, f})) == Feasibility::Infeasible);
    CHECK(check_feasibility(pcof({t, t})) == Feasibility::Feasible);
}

TEST_CASE("negation is an involution that flips satisfiability pointwise") {
    std::vector<Atom> atoms = {int_cmp(1, "<", 5), int_cmp(1, "==", 5),
                               str_eq(2, "k"), Atom{Atom::Kind::IsNull, 2}};
    for (const auto& a : atoms) {
        Atom n = a.negated();
        Atom nn = n.negated();
        CHECK(nn.to_string() == a.to_string());
        // a && !a is always unsatisfiable
        CHECK(check_feasibility(pcof({a, n})) == Feasibility::Infeasible);
    }
}

TEST_CASE("union-find: equalities propagate interval conflicts") {
    CHECK(check_feasibility(pcof({sym_eq(1, 2), int_cmp(1, "<", 0), int_cmp(2, ">", 0)})) ==
          Feasibility::Infeasible);
    CHECK(check_feasibility(pcof({sym_eq(1, 2), sym_eq(2, 3), int_cmp(1, "==", 4),
                                  int_cmp(3, "==", 5)})) == Feasibility::Infeasible);
    CHECK(check_feasibility(pcof({sym_eq(1, 2), int_cmp(1, ">=", 0), int_cmp(2, "<=", 0)})) ==
          Feasibility::Feasible);
}

TEST_CASE("excluded points can hollow out a small interval") {
    PathConstraint pc = pcof({int_cmp(1, ">", 0), int_cmp(1, "<", 4), int_cmp(1, "!=", 1),
                              int_cmp(1, "!=", 2), int_cmp(1, "!=", 3)});
    CHECK(check_feasibility(pc) == Feasibility::Infeasible);
    CHECK(brute_force(pc) == Feasibility::Infeasible);
}

TEST_CASE("randomized agreement with the brute-force oracle: integer theory") {
    std::mt19937_64 rng(20260823);
    std::uniform_int_distribution<int> nsym(1, 3), natom(1, 5), opPick(0, 5),
        boundPick(-8, 8), coin(0, 1);
    const char* ops[] = {"==", "!=", "<", ">", "<=", ">="};
    int infeasibleSeen = 0;
    for (int iter = 0; iter < 400; ++iter) {
        int n = nsym(rng);
        PathConstraint pc;
        for (int k = natom(rng); k-- > 0;) {
            uint64_t s = 1 + (uint64_t)(rng() % n);
            if (n > 1 && coin(rng)) {
                uint64_t t = 1 + (uint64_t)(rng() % n);
                if (t != s) {
                    pc.add(sym_eq(s, t));
                    continue;
                }
            }
            pc.add(int_cmp(s, ops[opPick(rng)], boundPick(rng)));
        }
        Feasibility got = check_feasibility(pc);
        Feasibility want = brute_force(pc);
        CHECK_MESSAGE(got == want, "constraint: " << pc.to_string());
        if (want == Feasibility::Infeasible) ++infeasibleSeen;
    }
    // the family must actually exercise both outcomes
    CHECK(infeasibleSeen > 20);
}

TEST_CASE("randomized agreement with the brute-force oracle: string theory") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> natom(1, 4), kindPick(0, 3), constPick(0, 1);
    const char* consts[] = {"a", "b"};
    int infeasibleSeen = 0;
    for (int iter = 0; iter < 300; ++iter) {
        PathConstraint pc;
        for (int k = natom(rng); k-- > 0;) {
            uint64_t s = 1 + (uint64_t)(rng() % 2);
            switch (kindPick(rng)) {
                case 0: pc.add(str_eq(s, consts[constPick(rng)])); break;
                case 1: pc.add(str_neq(s, consts[constPick(rng)])); break;
                case 2: pc.add(Atom{Atom::Kind::IsNull, s}); break;
                default: pc.add(Atom{Atom::Kind::NotNull, s}); break;
            }
        }
        Feasibility got = check_feasibility(pc);
        Feasibility want = brute_force(pc);
        CHECK_MESSAGE(got == want, "constraint: " << pc.to_string());
        if (want == Feasibility::Infeasible) ++infeasibleSeen;
    }
    CHECK(infeasibleSeen > 10);
}

TEST_CASE("serialization uses symbol names when provided") {
    PathConstraint pc = pcof({int_cmp(4, ">", 3)});
    std::map<uint64_t, std::string> names{{4, "i4"}};
    CHECK(pc.to_string(names) == "i4 > 3");
    CHECK(pcof({}).to_string() == "true");
}
