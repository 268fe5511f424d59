#pragma once

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "leaksem/ast.hpp"
#include "leaksem/catalog.hpp"

namespace leaksem {

// Edge roles in the per-component dummy-main graph. Lifecycle and registration
// edges model framework invocation order; call edges come from `call m` statements.
enum class EdgeKind { Lifecycle, Registration, Call };

struct CallEdge {
    std::string from, to;
    EdgeKind kind;
    bool operator<(const CallEdge& o) const {
        return std::tie(from, to, kind) < std::tie(o.from, o.to, o.kind);
    }
};

struct CallGraph {
    std::string component;
    std::set<std::string> nodes;       // dummyMain, callbacks, listeners, local methods
    std::set<CallEdge> edges;
    std::set<std::string> entryNodes;  // lifecycle callbacks + listeners

    bool has_edge(const std::string& a, const std::string& b) const {
        for (const auto& e : edges)
            if (e.from == a && e.to == b) return true;
        return false;
    }
};

struct SourceSite {
    std::string component;
    std::string method;       // node id of the enclosing callback/listener/method
    int statementIndex = 0;   // position within the (flattened) method body
    std::string apiName;
    std::string dataType;
    bool operator==(const SourceSite& o) const {
        return component == o.component && method == o.method &&
               statementIndex == o.statementIndex && apiName == o.apiName;
    }
};

struct EntryPointResult {
    SourceSite source;
    std::vector<std::string> entryPoints;  // deterministic order
};

// One dummy-main graph per component; dummyMain -> onCreate, registration edges
// onCreate -> every other callback/listener, call edges per `call m` statements.
CallGraph build_call_graph(const Component& component, const ApiCatalog& catalog);

// All source-API invocations, in component order then statement order.
std::vector<SourceSite> locate_sources(const Program& program, const ApiCatalog& catalog);

// Entry callbacks/listeners from which the source's method is reachable,
// computed as reachability over reversed call edges.
EntryPointResult entry_points_for_source(const CallGraph& graph, const SourceSite& source);

// DOT rendering for `leaksem graph --dot`.
std::string to_dot(const CallGraph& g);

}  // namespace leaksem
