#include "leaksem/flowstore.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace leaksem {

using nlohmann::json;

bool FlowRecord::operator==(const FlowRecord& o) const {
    return appId == o.appId && component == o.component && trace == o.trace &&
           sinkApi == o.sinkApi && url == o.url && urlTemplate == o.urlTemplate &&
           carriedTaint == o.carriedTaint && sensitive == o.sensitive &&
           pathConstraint == o.pathConstraint && label == o.label &&
           hostnameDecrypted == o.hostnameDecrypted &&
           provenanceTraces == o.provenanceTraces;
}

FlowRecord to_flow_record(const SinkEvent& ev, const std::string& appId) {
    FlowRecord r;
    r.appId = appId;
    r.component = ev.component;
    r.trace = ev.trace.callbacks;
    r.sinkApi = ev.sinkApi;
    r.url = ev.url;
    r.urlTemplate = ev.urlTemplate;
    r.carriedTaint.assign(ev.carriedTaint.begin(), ev.carriedTaint.end());
    r.sensitive = ev.sensitive;
    r.pathConstraint = ev.pcText;
    r.hostnameDecrypted = ev.hostnameDecrypted;
    return r;
}

std::vector<FlowRecord> dedup_flows(const std::vector<FlowRecord>& records) {
    std::vector<FlowRecord> out;
    std::map<std::pair<std::string, std::string>, size_t> index;  // (appId, url) -> out pos
    for (const auto& r : records) {
        auto key = std::make_pair(r.appId, r.url);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, out.size());
            out.push_back(r);
        } else {
            FlowRecord& kept = out[it->second];
            kept.provenanceTraces.push_back(r.trace);
            for (const auto& p : r.provenanceTraces) kept.provenanceTraces.push_back(p);
            // Taint union across merged paths; sensitivity follows.
            std::set<std::string> t(kept.carriedTaint.begin(), kept.carriedTaint.end());
            t.insert(r.carriedTaint.begin(), r.carriedTaint.end());
            kept.carriedTaint.assign(t.begin(), t.end());
            kept.sensitive = kept.sensitive || r.sensitive;
            kept.hostnameDecrypted = kept.hostnameDecrypted || r.hostnameDecrypted;
        }
    }
    return out;
}

namespace {

json to_json(const FlowRecord& r) {
    json j;
    j["appId"] = r.appId;
    j["component"] = r.component;
    j["trace"] = r.trace;
    j["sinkApi"] = r.sinkApi;
    j["url"] = r.url;
    j["urlTemplate"] = r.urlTemplate;
    j["carriedTaint"] = r.carriedTaint;
    j["sensitive"] = r.sensitive;
    j["pathConstraint"] = r.pathConstraint;
    j["label"] = r.label;
    j["hostnameDecrypted"] = r.hostnameDecrypted;
    j["provenanceTraces"] = r.provenanceTraces;
    return j;
}

FlowRecord from_json(const json& j) {
    FlowRecord r;
    r.appId = j.at("appId").get<std::string>();
    r.component = j.at("component").get<std::string>();
    r.trace = j.at("trace").get<std::vector<std::string>>();
    r.sinkApi = j.at("sinkApi").get<std::string>();
    r.url = j.at("url").get<std::string>();
    r.urlTemplate = j.at("urlTemplate").get<std::string>();
    r.carriedTaint = j.at("carriedTaint").get<std::vector<std::string>>();
    r.sensitive = j.at("sensitive").get<bool>();
    r.pathConstraint = j.at("pathConstraint").get<std::string>();
    r.label = j.at("label").get<std::string>();
    r.hostnameDecrypted = j.at("hostnameDecrypted").get<bool>();
    r.provenanceTraces = j.at("provenanceTraces").get<std::vector<std::vector<std::string>>>();
    return r;
}

}  // namespace

std::string export_flows(const std::vector<FlowRecord>& records) {
    std::string out = json{{"schemaVersion", 1}}.dump() + "\n";
    for (const auto& r : records) out += to_json(r).dump() + "\n";
    return out;
}

void export_flows_file(const std::vector<FlowRecord>& records, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << export_flows(records);
}

std::vector<FlowRecord> import_flows(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineNo = 0;
    std::vector<FlowRecord> out;
    bool headerSeen = false;
    while (std::getline(is, line)) {
        ++lineNo;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error("flow file line " + std::to_string(lineNo) +
                                     ": malformed JSON: " + e.what());
        }
        if (!headerSeen) {
            if (!j.contains("schemaVersion"))
                throw std::runtime_error("flow file line 1: missing schemaVersion header");
            int v = j["schemaVersion"].get<int>();
            if (v != 1)
                throw std::runtime_error("flow file: unsupported schemaVersion " +
                                         std::to_string(v));
            headerSeen = true;
            continue;
        }
        try {
            out.push_back(from_json(j));
        } catch (const std::exception& e) {
            throw std::runtime_error("flow file line " + std::to_string(lineNo) + ": " +
                                     e.what());
        }
    }
    if (!headerSeen) throw std::runtime_error("flow file: missing schemaVersion header");
    return out;
}

std::vector<FlowRecord> import_flows_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return import_flows(buf.str());
}

std::vector<LabelRule> parse_label_manifest(const std::string& text) {
    std::vector<LabelRule> rules;
    std::istringstream is(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(is, line)) {
        ++lineNo;
        if (line.empty() || line[0] == '#') continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("label manifest line " + std::to_string(lineNo) +
                                     ": expected '<pattern>\\t<label>'");
        LabelRule r{line.substr(0, tab), line.substr(tab + 1)};
        if (r.label != "legal" && r.label != "illegal")
            throw std::runtime_error("label manifest line " + std::to_string(lineNo) +
                                     ": label must be legal or illegal");
        rules.push_back(std::move(r));
    }
    return rules;
}

bool host_pattern_matches(const std::string& pattern, const std::string& url) {
    std::string host = url.substr(0, url.find_first_of("/?"));
    // strip a scheme prefix if present
    size_t scheme = host.find("://");
    if (scheme != std::string::npos) {
        std::string rest = url.substr(scheme + 3);
        host = rest.substr(0, rest.find_first_of("/?"));
    }
    if (pattern.rfind("*.", 0) == 0) {
        std::string suffix = pattern.substr(1);  // ".example.com"
        std::string bare = pattern.substr(2);    // "example.com"
        if (host == bare) return true;
        return host.size() > suffix.size() &&
               host.compare(host.size() - suffix.size(), suffix.size(), suffix) == 0;
    }
    return host == pattern;
}

LabelStats label_flows(std::vector<FlowRecord>& records, const std::vector<LabelRule>& rules) {
    LabelStats stats;
    for (auto& r : records) {
        int matches = 0;
        for (const auto& rule : rules) {
            if (host_pattern_matches(rule.pattern, r.url)) {
                if (matches == 0) {
                    r.label = rule.label;
                    ++stats.labeled;
                }
                ++matches;
            }
        }
        if (matches == 0) ++stats.unmatched;
        if (matches > 1) ++stats.collisions;
    }
    return stats;
}

}  // namespace leaksem
