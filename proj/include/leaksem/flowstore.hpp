#pragma once

#include <string>
#include <vector>

#include "leaksem/executor.hpp"

namespace leaksem {

struct FlowRecord {
    std::string appId;
    std::string component;
    std::vector<std::string> trace;     // callbacks of the first trace that hit the sink
    std::string sinkApi;
    std::string url;
    std::string urlTemplate;
    std::vector<std::string> carriedTaint;  // sorted data types
    bool sensitive = false;
    std::string pathConstraint;
    std::string label = "unlabeled";    // unlabeled | legal | illegal
    bool hostnameDecrypted = false;
    std::vector<std::vector<std::string>> provenanceTraces;  // traces merged by dedup

    bool operator==(const FlowRecord& o) const;
};

FlowRecord to_flow_record(const SinkEvent& ev, const std::string& appId);

// Per-app URL dedup: records with the same (appId, url) collapse into one;
// the first trace is kept and the others move to the provenance list.
std::vector<FlowRecord> dedup_flows(const std::vector<FlowRecord>& records);

// JSONL round-trip, schemaVersion header line first.
std::string export_flows(const std::vector<FlowRecord>& records);
void export_flows_file(const std::vector<FlowRecord>& records, const std::string& path);
std::vector<FlowRecord> import_flows(const std::string& text);
std::vector<FlowRecord> import_flows_file(const std::string& path);

struct LabelRule {
    std::string pattern;  // host pattern, '*' wildcard on leading host segments
    std::string label;
};

struct LabelStats {
    int labeled = 0;
    int unmatched = 0;
    int collisions = 0;  // records matched by more than one rule
};

std::vector<LabelRule> parse_label_manifest(const std::string& text);
// First matching rule wins (manifest order); unmatched records stay unlabeled.
LabelStats label_flows(std::vector<FlowRecord>& records, const std::vector<LabelRule>& rules);

bool host_pattern_matches(const std::string& pattern, const std::string& url);

}  // namespace leaksem
