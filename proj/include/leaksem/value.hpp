#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "leaksem/ast.hpp"
#include "leaksem/catalog.hpp"

namespace leaksem {

using TaintSet = std::set<std::string>;  // source data types

// Union of operand taints; the propagation rule for x = y binop z, concat,
// assignment and array reads alike.
TaintSet propagate_taint(const std::vector<TaintSet>& operands);

// A string value is a sequence of segments so that concrete and symbolic parts
// survive concatenation; rendering joins concrete text verbatim and prints
// symbolic parts as "(.*)".
struct StrSeg {
    bool symbolic = false;
    std::string text;      // concrete payload
    uint64_t sym = 0;      // symbol id when symbolic
    TaintSet taint;
    bool decrypted = false;  // produced by a decryptTable env call
};

struct Value {
    ValType type = ValType::Str;

    // Int / Bool
    bool symbolic = false;
    uint64_t sym = 0;
    long long i = 0;
    bool b = false;

    // Str
    bool isNull = false;
    std::vector<StrSeg> segs;

    // StrArray
    std::vector<Value> arr;

    TaintSet taint;

    static Value concrete_str(std::string s, TaintSet t = {});
    static Value null_str();
    static Value symbolic_str(uint64_t sym, TaintSet t = {});
    static Value concrete_int(long long v, TaintSet t = {});
    static Value symbolic_int(uint64_t sym, TaintSet t = {});
    static Value concrete_bool(bool v, TaintSet t = {});
    static Value symbolic_bool(uint64_t sym, TaintSet t = {});

    bool is_concrete() const;
    // Concrete string payload (all segments joined); only valid when concrete and non-null.
    std::string str_text() const;
    // Rendered form: concrete text verbatim, symbolic segments as "(.*)".
    std::string render() const;
    // Template form: tainted concrete segments replaced by <DATATYPE>, symbolic by "(.*)".
    std::string render_template() const;
    // Canonical dump used for state hashing.
    void dump(std::string& out) const;
};

// Concatenation for string values (either operand may be int/bool, which is
// stringified first).
Value concat_values(const Value& a, const Value& b);

}  // namespace leaksem
