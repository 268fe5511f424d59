#include "leaksem/catalog.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace leaksem {

std::string to_string(SymOrigin o) {
    switch (o) {
        case SymOrigin::UserInput: return "userInput";
        case SymOrigin::DeviceStatus: return "deviceStatus";
        case SymOrigin::NaturalEnvironment: return "naturalEnvironment";
        case SymOrigin::IncomingInfo: return "incomingInfo";
        case SymOrigin::LoopSummary: return "loopSummary";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

SymOrigin parse_origin(const std::string& s, int line) {
    if (s == "userInput") return SymOrigin::UserInput;
    if (s == "deviceStatus") return SymOrigin::DeviceStatus;
    if (s == "naturalEnvironment") return SymOrigin::NaturalEnvironment;
    if (s == "incomingInfo") return SymOrigin::IncomingInfo;
    throw std::runtime_error("catalog line " + std::to_string(line) +
                             ": unknown origin " + s);
}

// Extracts "inner" from "name(inner)"; returns false if there is no paren part.
bool split_call(const std::string& s, std::string& name, std::string& inner) {
    size_t lp = s.find('(');
    if (lp == std::string::npos) {
        name = trim(s);
        inner = "";
        return false;
    }
    size_t rp = s.rfind(')');
    if (rp == std::string::npos || rp < lp)
        throw std::runtime_error("malformed catalog entry: " + s);
    name = trim(s.substr(0, lp));
    inner = trim(s.substr(lp + 1, rp - lp - 1));
    return true;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    bool inStr = false;
    for (char c : s) {
        if (c == '"') inStr = !inStr;
        if (!inStr) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) {
                out.push_back(trim(cur));
                cur.clear();
                continue;
            }
        }
        cur += c;
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

ApiSpec parse_spec(const std::string& name, const std::string& rhs, int line) {
    ApiSpec spec;
    spec.name = name;
    std::string head, inner;
    split_call(rhs, head, inner);
    auto fail = [&](const std::string& msg) -> ApiSpec& {
        throw std::runtime_error("catalog line " + std::to_string(line) + ": " + msg);
    };
    if (head == "source") {
        spec.kind = ApiSpec::Kind::Source;
        if (inner.empty()) fail("source needs a data type");
        spec.dataType = inner;
    } else if (head == "sink") {
        spec.kind = ApiSpec::Kind::Sink;
    } else if (head == "env") {
        spec.kind = ApiSpec::Kind::Env;
        std::string beh, behInner;
        split_call(inner, beh, behInner);
        if (beh == "forcedTrue") {
            spec.env = ApiSpec::EnvBehavior::ForcedTrue;
        } else if (beh == "fixedValue") {
            spec.env = ApiSpec::EnvBehavior::FixedValue;
            std::string v = trim(behInner);
            if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
                spec.fixedStr = v.substr(1, v.size() - 2);
            } else if (!v.empty() &&
                       (std::isdigit((unsigned char)v[0]) || v[0] == '-')) {
                spec.fixedInt = std::stoll(v);
                spec.fixedIsInt = true;
            } else {
                fail("fixedValue needs a quoted string or integer literal");
            }
        } else if (beh == "symbolic") {
            spec.env = ApiSpec::EnvBehavior::Symbolic;
            auto parts = split_commas(behInner);
            if (parts.empty()) fail("symbolic needs a type");
            if (parts[0] == "string") spec.envType = ValType::Str;
            else if (parts[0] == "int") spec.envType = ValType::Int;
            else if (parts[0] == "bool") spec.envType = ValType::Bool;
            else fail("symbolic type must be string/int/bool");
            if (parts.size() > 1) spec.envOrigin = parse_origin(parts[1], line);
        } else if (beh == "decryptTable") {
            spec.env = ApiSpec::EnvBehavior::DecryptTable;
            for (const auto& kv : split_commas(behInner)) {
                size_t eqp = kv.find('=');
                if (eqp == std::string::npos) fail("decryptTable entries are k=v");
                spec.decryptTable[trim(kv.substr(0, eqp))] = trim(kv.substr(eqp + 1));
            }
        } else if (beh == "symbolicArray") {
            spec.env = ApiSpec::EnvBehavior::SymbolicArray;
            spec.envOrigin = SymOrigin::IncomingInfo;
            auto parts = split_commas(behInner);
            if (!parts.empty()) spec.elementCount = std::stoi(parts[0]);
            if (spec.elementCount < 1) fail("symbolicArray element count must be >= 1");
            if (parts.size() > 1) spec.envOrigin = parse_origin(parts[1], line);
        } else {
            fail("unknown env behavior " + beh);
        }
    } else {
        fail("entry kind must be source/sink/env");
    }
    return spec;
}

}  // namespace

ApiCatalog load_api_catalog(const std::string& text) {
    ApiCatalog cat;
    std::istringstream is(text);
    std::string lineText;
    int line = 0;
    while (std::getline(is, lineText)) {
        ++line;
        std::string s = lineText;
        size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        size_t colon = s.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("catalog line " + std::to_string(line) +
                                     ": expected '<name> : <spec>'");
        std::string name = trim(s.substr(0, colon));
        if (name.empty())
            throw std::runtime_error("catalog line " + std::to_string(line) +
                                     ": empty api name");
        if (cat.entries.count(name))
            throw std::runtime_error("catalog line " + std::to_string(line) +
                                     ": duplicate api name " + name);
        cat.entries.emplace(name, parse_spec(name, trim(s.substr(colon + 1)), line));
    }
    return cat;
}

std::string default_catalog_text() {
    return R"(# sources
getDeviceId : source(IMEI)
getLongitude : source(LOCATION_LON)
getLatitude : source(LOCATION_LAT)
getPhoneNumber : source(PHONE_NUMBER)
getSmsSender : source(SMS)

# sinks
openConnection : sink
transmit : sink
runPackage : sink

# environment stubs
isConnected : env(forcedTrue)
decrypt : env(decryptTable(ax3mkl4mgele2guoo9f1hc3ohm=xml.meego91.com, q8gz0p2d=c2.stealthnet.cn))
getHttpResponse : env(symbolicArray(4, incomingInfo))
getDisplayName : env(symbolic(string, deviceStatus))
getSmsBody : env(symbolic(string, incomingInfo))
getSearchTask : env(symbolic(string, incomingInfo))
getText : env(symbolic(string, userInput))
getHour : env(symbolic(int, naturalEnvironment))
getDayOfWeek : env(symbolic(int, naturalEnvironment))
getBatteryLevel : env(symbolic(int, deviceStatus))
getAdHost : env(fixedValue("ads.libstub.com"))
log : env(fixedValue(0))
)";
}

const ApiCatalog& default_catalog() {
    static const ApiCatalog cat = load_api_catalog(default_catalog_text());
    return cat;
}

}  // namespace leaksem
