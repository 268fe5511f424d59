#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "leaksem/ast.hpp"
#include "leaksem/callgraph.hpp"
#include "leaksem/catalog.hpp"
#include "leaksem/config.hpp"
#include "leaksem/constraint.hpp"
#include "leaksem/value.hpp"

namespace leaksem {

struct ExecutionTrace {
    std::string component;
    std::vector<std::string> callbacks;  // callbacks[0] is onCreate
    enum class Provenance { Basic, Expanded };
    Provenance provenance = Provenance::Basic;
    std::string parentKey;       // expanded: key() of the parent trace
    std::string addedCallback;   // expanded: the appended callback

    std::string key() const;
    bool operator==(const ExecutionTrace& o) const {
        return component == o.component && callbacks == o.callbacks;
    }
};

struct SinkEvent {
    std::string component;
    ExecutionTrace trace;
    std::string sinkApi;
    std::vector<Value> args;
    TaintSet carriedTaint;             // union over argument taints
    PathConstraint pcAtSink;
    std::string pcText;                // serialized with symbol names
    std::string url;                   // rendered sink payload
    std::string urlTemplate;           // tainted segments as <TYPE>, symbolic as (.*)
    bool sensitive = false;
    bool hostnameDecrypted = false;    // a decryptTable call fed the payload
};

struct ExplorationStats {
    int pathsExplored = 0;
    int pathsPruned = 0;
    int snapshotsTaken = 0;
    int snapshotHashChecks = 0;
    int snapshotHashMismatches = 0;
    bool pathBudgetExceeded = false;
    bool traceBudgetExceeded = false;
    std::vector<PathConstraint> prunedConstraints;
    std::vector<PathConstraint> completedConstraints;  // PC of each finished path

    void merge(const ExplorationStats& o);
};

struct TraceResult {
    std::vector<SinkEvent> sinks;
    std::set<std::string> taintedFields;  // component fields tainted at any path end
    ExplorationStats stats;
    std::vector<std::string> errors;
};

// Basic traces: one per (source, entry) pair, lifecycle prefix + entry, deduplicated.
std::vector<ExecutionTrace> generate_basic_traces(const CallGraph& graph,
                                                  const std::vector<EntryPointResult>& entries,
                                                  const Config& cfg);

// Concolic interpretation of one trace over one component.
TraceResult execute_trace(const Program& program, const ExecutionTrace& trace,
                          const ApiCatalog& catalog, const Config& cfg);

// Trace expansion: append each executable callback that syntactically reads a
// newly tainted field, within length and count budgets. A read only counts if
// it sits strictly before the callback's first write to the same field, since
// later reads already saw any taint the callback itself produced.
std::vector<ExecutionTrace> expand_traces(const ExecutionTrace& executed,
                                          const std::set<std::string>& newlyTainted,
                                          const Component& component, const Config& cfg);

// Fields read (syntactically) by a callback body, following `call m` closures.
std::set<std::string> fields_read_by(const Component& c, const std::string& callback);

// Fields with a read at a pre-order position strictly before the callback's
// first write to them (the expansion trigger set).
std::set<std::string> fields_read_before_write(const Component& c,
                                               const std::string& callback);

struct AnalysisResult {
    std::vector<SinkEvent> sinks;
    ExplorationStats stats;
    std::vector<std::string> errors;
    int tracesExecuted = 0;
};

// Full pipeline: static analysis, basic traces, execution with expansion to
// fixpoint or budget. Never aborts the whole app for one failing trace.
AnalysisResult analyze_app(const Program& program, const ApiCatalog& catalog,
                           const Config& cfg);

}  // namespace leaksem
