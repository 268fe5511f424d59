#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "leaksem/callgraph.hpp"
#include "leaksem/catalog.hpp"
#include "leaksem/parser.hpp"

using namespace leaksem;

namespace {

Program parse(const std::string& text) { return parse_program(text, default_catalog()); }

// Reference shape: lifecycle callbacks, one listener, one local helper.
const char* kLifecycle = R"(
app LifecycleDemo {
  component Activity Activity1 {
    field url : string = "";
    field imei : string = "";
    field tmp : string = "";

    callback onCreate { url = "gongfu188.com"; }
    callback onLowMemory {
      url = url + imei;
      openConnection(url);
      imei = tmp;
    }
    callback onDestroy { log("finish"); }
    listener onClick { tmp = getDeviceId(); }
  }
}
)";

const char* kShared = R"(
app Shared {
  component Activity M {
    callback onCreate { log("up"); }
    listener onClick { call helper; }
    listener onLowMemory { call helper; }
    method helper {
      id = getDeviceId();
      pos = getLatitude();
      openConnection(id + pos);
    }
  }
}
)";

}  // namespace

TEST_CASE("dummy-main graph has lifecycle, registration and call edges") {
    Program p = parse(kLifecycle);
    CallGraph g = build_call_graph(p.components[0], default_catalog());

    CHECK(g.component == "Activity1");
    CHECK(g.nodes.count("dummyMain"));
    CHECK(g.has_edge("dummyMain", "onCreate"));
    CHECK(g.has_edge("onCreate", "onLowMemory"));
    CHECK(g.has_edge("onCreate", "onDestroy"));
    CHECK(g.has_edge("onCreate", "onClick"));
    CHECK_FALSE(g.has_edge("onClick", "onLowMemory"));

    auto kind_of = [&](const std::string& a, const std::string& b) {
        for (const auto& e : g.edges)
            if (e.from == a && e.to == b) return e.kind;
        FAIL("missing edge");
        return EdgeKind::Call;
    };
    CHECK(kind_of("dummyMain", "onCreate") == EdgeKind::Lifecycle);
    CHECK(kind_of("onCreate", "onLowMemory") == EdgeKind::Lifecycle);
    CHECK(kind_of("onCreate", "onClick") == EdgeKind::Registration);

    CHECK(g.entryNodes.count("onCreate"));
    CHECK(g.entryNodes.count("onClick"));
    CHECK(g.entryNodes.count("onLowMemory"));
    CHECK_FALSE(g.entryNodes.count("dummyMain"));
}

TEST_CASE("call statements produce Call edges to local methods") {
    Program p = parse(kShared);
    CallGraph g = build_call_graph(p.components[0], default_catalog());
    CHECK(g.has_edge("onClick", "helper"));
    CHECK(g.has_edge("onLowMemory", "helper"));
    CHECK_FALSE(g.entryNodes.count("helper"));
}

TEST_CASE("source located inside a shared helper maps to both listeners") {
    Program p = parse(kShared);
    CallGraph g = build_call_graph(p.components[0], default_catalog());
    std::vector<SourceSite> sites = locate_sources(p, default_catalog());
    REQUIRE(sites.size() == 2);
    CHECK(sites[0].apiName == "getDeviceId");
    CHECK(sites[0].dataType == "IMEI");
    CHECK(sites[1].apiName == "getLatitude");
    // two sources in one method enumerate in statement order
    CHECK(sites[0].statementIndex < sites[1].statementIndex);

    EntryPointResult r = entry_points_for_source(g, sites[0]);
    std::vector<std::string> eps = r.entryPoints;
    std::sort(eps.begin(), eps.end());
    CHECK(eps == std::vector<std::string>{"onClick", "onLowMemory"});
}

TEST_CASE("source in a listener maps to exactly that listener") {
    Program p = parse(kLifecycle);
    CallGraph g = build_call_graph(p.components[0], default_catalog());
    std::vector<SourceSite> sites = locate_sources(p, default_catalog());
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].method == "onClick");
    EntryPointResult r = entry_points_for_source(g, sites[0]);
    CHECK(r.entryPoints == std::vector<std::string>{"onClick"});
}

TEST_CASE("components get isolated graphs") {
    Program p = parse(R"(
app Two {
  component Activity A {
    callback onCreate { log("a"); }
    listener onPing { id = getDeviceId(); openConnection(id); }
  }
  component Service B {
    callback onCreate { log("b"); }
    method helper { log("h"); }
  }
}
)");
    CallGraph ga = build_call_graph(p.components[0], default_catalog());
    CallGraph gb = build_call_graph(p.components[1], default_catalog());
    CHECK(ga.nodes.count("onPing"));
    CHECK_FALSE(gb.nodes.count("onPing"));
    CHECK(gb.nodes.count("helper"));
    CHECK_FALSE(ga.nodes.count("helper"));
}

TEST_CASE("DOT rendering names every node and edge") {
    Program p = parse(kLifecycle);
    std::string dot = to_dot(build_call_graph(p.components[0], default_catalog()));
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("dummyMain") != std::string::npos);
    CHECK(dot.find("onLowMemory") != std::string::npos);
    CHECK(dot.find("->") != std::string::npos);
}

TEST_CASE("forward search soundness: every sink-bearing callback stays reachable") {
    // Any callback is reachable from dummyMain via onCreate by construction;
    // a sink can therefore never sit in an unreachable node.
    Program p = parse(kShared);
    CallGraph g = build_call_graph(p.components[0], default_catalog());
    for (const auto& n : g.nodes) {
        if (n == "dummyMain") continue;
        bool viaCreate = n == "onCreate" || g.has_edge("onCreate", n) ||
                         g.has_edge("onClick", n) || g.has_edge("onLowMemory", n);
        CHECK_MESSAGE(viaCreate, "unreachable node " << n);
    }
}
