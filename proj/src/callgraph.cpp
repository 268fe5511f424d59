#include "leaksem/callgraph.hpp"

#include <deque>
#include <sstream>
#include <stdexcept>

namespace leaksem {

namespace {

void collect_local_calls(const Block& b, std::set<std::string>& out) {
    for (const auto& s : b) {
        if (s.kind == Stmt::Kind::LocalCall) out.insert(s.callee);
        if (s.thenBlock) collect_local_calls(*s.thenBlock, out);
        if (s.elseBlock) collect_local_calls(*s.elseBlock, out);
    }
}

}  // namespace

CallGraph build_call_graph(const Component& component, const ApiCatalog&) {
    CallGraph g;
    g.component = component.name;
    g.nodes.insert("dummyMain");
    for (const auto& n : component.callbackOrder) {
        g.nodes.insert(n);
        g.entryNodes.insert(n);
    }
    for (const auto& n : component.listenerOrder) {
        g.nodes.insert(n);
        g.entryNodes.insert(n);
    }
    for (const auto& n : component.methodOrder) g.nodes.insert(n);

    g.edges.insert({"dummyMain", "onCreate", EdgeKind::Lifecycle});
    for (const auto& n : component.callbackOrder)
        if (n != "onCreate") g.edges.insert({"onCreate", n, EdgeKind::Lifecycle});
    for (const auto& n : component.listenerOrder)
        g.edges.insert({"onCreate", n, EdgeKind::Registration});

    auto add_call_edges = [&](const std::string& from, const MethodBody& body) {
        std::set<std::string> callees;
        collect_local_calls(body.stmts, callees);
        for (const auto& m : callees) {
            if (!component.methods.count(m))
                throw std::runtime_error("component " + component.name +
                                         ": call to undeclared method " + m);
            g.edges.insert({from, m, EdgeKind::Call});
        }
    };
    for (const auto& [n, b] : component.callbacks) add_call_edges(n, b);
    for (const auto& [n, b] : component.listeners) add_call_edges(n, b);
    for (const auto& [n, b] : component.methods) add_call_edges(n, b);
    return g;
}

namespace {

void locate_in_block(const Component& c, const std::string& methodNode, const Block& b,
                     const ApiCatalog& catalog, int& idx, std::vector<SourceSite>& out) {
    for (const auto& s : b) {
        if (s.kind == Stmt::Kind::ApiCall) {
            const ApiSpec* spec = catalog.find(s.callee);
            if (spec && spec->kind == ApiSpec::Kind::Source)
                out.push_back({c.name, methodNode, idx, s.callee, spec->dataType});
        }
        ++idx;
        if (s.thenBlock) locate_in_block(c, methodNode, *s.thenBlock, catalog, idx, out);
        if (s.elseBlock) locate_in_block(c, methodNode, *s.elseBlock, catalog, idx, out);
    }
}

}  // namespace

std::vector<SourceSite> locate_sources(const Program& program, const ApiCatalog& catalog) {
    std::vector<SourceSite> out;
    for (const auto& c : program.components) {
        auto scan = [&](const std::vector<std::string>& order,
                        const std::map<std::string, MethodBody>& bodies) {
            for (const auto& n : order) {
                int idx = 0;
                locate_in_block(c, n, bodies.at(n).stmts, catalog, idx, out);
            }
        };
        scan(c.callbackOrder, c.callbacks);
        scan(c.listenerOrder, c.listeners);
        scan(c.methodOrder, c.methods);
    }
    return out;
}

EntryPointResult entry_points_for_source(const CallGraph& graph, const SourceSite& source) {
    if (source.component != graph.component)
        throw std::runtime_error("source belongs to component " + source.component +
                                 ", graph is for " + graph.component);
    if (!graph.nodes.count(source.method))
        throw std::runtime_error("source method " + source.method + " not in graph");

    // BFS over reversed call edges: which methods can reach the source's method
    // through actual calls. Lifecycle/registration edges express framework ordering,
    // not calling, so they do not contribute.
    std::set<std::string> reached = {source.method};
    std::deque<std::string> work = {source.method};
    while (!work.empty()) {
        std::string cur = work.front();
        work.pop_front();
        for (const auto& e : graph.edges) {
            if (e.kind == EdgeKind::Call && e.to == cur && !reached.count(e.from)) {
                reached.insert(e.from);
                work.push_back(e.from);
            }
        }
    }
    EntryPointResult r;
    r.source = source;
    for (const auto& n : graph.entryNodes)
        if (reached.count(n)) r.entryPoints.push_back(n);
    return r;
}

std::string to_dot(const CallGraph& g) {
    std::ostringstream os;
    os << "digraph \"" << g.component << "\" {\n";
    for (const auto& n : g.nodes)
        os << "  \"" << g.component << "::" << n << "\";\n";
    for (const auto& e : g.edges) {
        os << "  \"" << g.component << "::" << e.from << "\" -> \"" << g.component
           << "::" << e.to << "\"";
        if (e.kind == EdgeKind::Registration) os << " [style=dashed]";
        if (e.kind == EdgeKind::Call) os << " [color=blue]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace leaksem
