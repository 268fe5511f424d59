#pragma once

// Reference interpreter used as a test oracle. Runs a callback trace fully
// concretely: every unknown environment call is resolved from an explicit
// assignment, and enumerate_sinks explores all assignments over small value
// domains derived from the program's own constants. Kept deliberately
// independent of the engine's symbolic machinery.

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "leaksem/ast.hpp"
#include "leaksem/catalog.hpp"
#include "leaksem/config.hpp"

namespace leaksem::oracle {

struct OSeg {
    bool fromEnv = false;  // value chosen by the assignment, not by the program
    std::string text;
    std::set<std::string> taint;
};

struct OValue {
    ValType type = ValType::Str;
    bool isNull = false;
    std::vector<OSeg> segs;  // Str
    long long i = 0;
    bool b = false;
    bool fromEnv = false;  // Int / Bool
    std::vector<OValue> arr;  // StrArray
    std::set<std::string> taint;

    static OValue str(std::string s, std::set<std::string> t = {}, bool env = false);
    static OValue null_str();
    static OValue integer(long long v, bool env = false);
    static OValue boolean(bool v, bool env = false);

    std::string text() const;   // concrete payload (throws on null)
    std::string templ() const;  // env parts as "(.*)", tainted parts as <TYPE>
};

// Slot identity: nth dynamic occurrence of an unknown env call. Array-valued
// calls contribute one string slot per element, keyed api#k.
using SlotId = std::pair<std::string, int>;

struct EnvSlot {
    SlotId id;
    ValType type = ValType::Str;
    bool operator<(const EnvSlot& o) const { return id < o.id || (id == o.id && type < o.type); }
};

using EnvAssign = std::map<SlotId, OValue>;

struct OSink {
    std::string api;
    std::string urlTemplate;
    std::vector<std::string> taint;  // sorted
    bool sensitive = false;

    auto key() const { return std::tie(api, urlTemplate, taint, sensitive); }
    bool operator<(const OSink& o) const { return key() < o.key(); }
    bool operator==(const OSink& o) const { return key() == o.key(); }
};

struct RunOutcome {
    std::vector<OSink> sinks;
    std::set<EnvSlot> missingSlots;  // consulted but absent from the assignment
    std::set<std::string> taintedFields;
};

RunOutcome run_trace(const Program& prog, const std::string& component,
                     const std::vector<std::string>& callbacks, const ApiCatalog& catalog,
                     const Config& cfg, const EnvAssign& assign);

// Value domains for enumeration, mined from the component's literals.
struct Domains {
    std::vector<long long> ints;
    std::vector<OValue> strs;  // includes null and a never-mentioned string
};
Domains mine_domains(const Component& c);

// Union of sink keys over every assignment of domain values to env slots.
// Slot discovery runs to fixpoint; throws if slots exceed maxSlots or the
// total number of runs exceeds maxRuns.
std::set<OSink> enumerate_sinks(const Program& prog, const std::string& component,
                                const std::vector<std::string>& callbacks,
                                const ApiCatalog& catalog, const Config& cfg,
                                size_t maxSlots = 5, size_t maxRuns = 300000);

}  // namespace leaksem::oracle
