#pragma once

#include <map>
#include <optional>
#include <string>

#include "leaksem/ast.hpp"

namespace leaksem {

// Origin categories for values unknown until runtime.
enum class SymOrigin { UserInput, DeviceStatus, NaturalEnvironment, IncomingInfo, LoopSummary };

std::string to_string(SymOrigin o);

struct ApiSpec {
    enum class Kind { Source, Sink, Env };
    enum class EnvBehavior { FixedValue, Symbolic, DecryptTable, ForcedTrue, SymbolicArray };

    std::string name;
    Kind kind = Kind::Env;

    std::string dataType;  // Source only (IMEI, LOCATION_LON, ...)

    EnvBehavior env = EnvBehavior::ForcedTrue;
    ValType envType = ValType::Str;                  // Symbolic
    SymOrigin envOrigin = SymOrigin::DeviceStatus;   // Symbolic / SymbolicArray
    std::string fixedStr;                            // FixedValue (string payload)
    long long fixedInt = 0;
    bool fixedIsInt = false;
    std::map<std::string, std::string> decryptTable;
    int elementCount = 4;  // SymbolicArray
};

struct ApiCatalog {
    std::map<std::string, ApiSpec> entries;

    const ApiSpec* find(const std::string& name) const {
        auto it = entries.find(name);
        return it == entries.end() ? nullptr : &it->second;
    }
    bool is_source(const std::string& name) const {
        auto* s = find(name);
        return s && s->kind == ApiSpec::Kind::Source;
    }
    bool is_sink(const std::string& name) const {
        auto* s = find(name);
        return s && s->kind == ApiSpec::Kind::Sink;
    }
};

// Parses the line-oriented catalog format:
//   <apiName> : source(<DataType>) | sink | env(<behavior>)
// where behavior is one of fixedValue(<literal>), symbolic(<type>[, <origin>]),
// decryptTable(<k>=<v>[, ...]), forcedTrue, symbolicArray(<count>).
ApiCatalog load_api_catalog(const std::string& text);

// Catalog shipped with the analyzer (sources, sinks and env stubs used by the corpus).
const ApiCatalog& default_catalog();
std::string default_catalog_text();

}  // namespace leaksem
