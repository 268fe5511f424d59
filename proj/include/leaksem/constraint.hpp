#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace leaksem {

// One atomic constraint over a symbolic value. The theory is deliberately
// small: integer comparisons against constants or other symbols, string
// (dis)equality against constants, null tests, and boolean pins.
struct Atom {
    enum class Kind { IntCmp, StrEq, StrNeq, IsNull, NotNull, BoolIs };
    Kind kind;
    uint64_t sym = 0;
    std::string op;          // IntCmp: ==, !=, <, >, <=, >=
    long long bound = 0;     // IntCmp vs constant
    bool rhsIsSym = false;   // IntCmp vs another symbol
    uint64_t rhsSym = 0;
    std::string strConst;    // StrEq / StrNeq
    bool boolVal = false;    // BoolIs

    Atom negated() const;
    std::string to_string(const std::map<uint64_t, std::string>& names = {}) const;
};

struct PathConstraint {
    std::vector<Atom> conjuncts;  // conjunction; empty means "true"

    void add(const Atom& a) { conjuncts.push_back(a); }
    std::string to_string(const std::map<uint64_t, std::string>& names = {}) const;
};

enum class Feasibility { Feasible, Infeasible };

// Decides satisfiability of the conjunction: interval propagation per integer
// symbol (with union-find over equalities), constant (dis)equality sets per
// string symbol, and polarity consistency for booleans and null tests.
Feasibility check_feasibility(const PathConstraint& pc);

}  // namespace leaksem
