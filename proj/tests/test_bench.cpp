#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "leaksem/bench.hpp"
#include "leaksem/classifier.hpp"

using namespace leaksem;

namespace {

const std::string kCorpusDir = std::string(LEAKSEM_SOURCE_DIR) + "/corpus";

}  // namespace

TEST_CASE("manifest loads every case with coherent expectations") {
    std::vector<BenchCase> cases = load_manifest(kCorpusDir + "/manifest.json");
    CHECK(cases.size() >= 24);
    int expectedMiss = 0;
    for (const auto& bc : cases) {
        CHECK(!bc.id.empty());
        CHECK(!bc.amlPath.empty());
        if (bc.expectedMiss) ++expectedMiss;
        bool noFlowCategory = bc.category == "noLeak" || bc.category == "infeasibleTrap";
        CHECK(noFlowCategory == bc.expectedFlows.empty());
    }
    CHECK(expectedMiss == 2);
}

TEST_CASE("every executor mechanism is exercised by at least two cases") {
    std::vector<BenchCase> cases = load_manifest(kCorpusDir + "/manifest.json");
    std::map<std::string, int> byCategory;
    for (const auto& bc : cases) ++byCategory[bc.category];
    for (const char* cat : {"eventOrdering", "logicBomb", "timeBomb", "loopBomb",
                            "infeasibleTrap", "encryptedHost", "plainLeak", "noLeak"})
        CHECK_MESSAGE(byCategory[cat] >= 2, "category " << cat);
}

TEST_CASE("full corpus: perfect accuracy, zero false positives, two known misses") {
    Config cfg;
    CorpusReport r = run_corpus(kCorpusDir, cfg);
    REQUIRE(r.cases.size() >= 24);
    for (const auto& c : r.cases) {
        INFO("case " << c.id << ": " << c.details);
        CHECK(c.status != "error");
        CHECK(c.status != "falsePositive");
    }
    CHECK(r.falsePositives == 0);
    CHECK(r.missedFlows == 2);  // the two expectedMiss cases
    CHECK(r.accuracy() == doctest::Approx(1.0));
    CHECK(r.precision() == doctest::Approx(1.0));
}

TEST_CASE("corpus reports are deterministic across runs") {
    Config cfg;
    std::string a = report_to_json(run_corpus(kCorpusDir, cfg));
    std::string b = report_to_json(run_corpus(kCorpusDir, cfg));
    CHECK(a == b);
}

TEST_CASE("sink-reach mode produces false positives the full mode avoids") {
    Config cfg;
    cfg.mode = AnalysisMode::SinkReach;
    CorpusReport r = run_corpus(kCorpusDir, cfg);
    CHECK(r.falsePositives > 0);
}

TEST_CASE("synthetic classifier corpus is balanced and labeled") {
    std::vector<FlowRecord> flows = make_classifier_corpus(11);
    CHECK(flows.size() >= 190);
    int illegal = 0, legal = 0, unlabeled = 0;
    for (const auto& f : flows) {
        if (f.label == "illegal") ++illegal;
        else if (f.label == "legal") ++legal;
        else ++unlabeled;
        CHECK(f.sensitive);
    }
    CHECK(unlabeled == 0);
    CHECK(illegal == legal);

    // determinism per seed
    std::vector<FlowRecord> again = make_classifier_corpus(11);
    REQUIRE(again.size() == flows.size());
    for (size_t i = 0; i < flows.size(); ++i) CHECK(again[i] == flows[i]);
}

TEST_CASE("synthetic corpus trains to high per-class F-measure") {
    std::vector<FlowRecord> flows = make_classifier_corpus(11);
    Config cfg;
    cfg.seed = 11;
    std::vector<LabeledFlow> data = build_dataset(flows, DatasetMode::Host, cfg);
    EvalReport r = cross_validate(data, cfg);
    CHECK(r.illegal.fMeasure() >= 0.90);
    CHECK(r.legal.fMeasure() >= 0.90);
    CHECK_FALSE(r.leakageGuardTriggered);
}

TEST_CASE("encrypted-host degradation: disjoint pools open a gap, same pools do not") {
    Config cfg;
    std::vector<FlowRecord> disjoint = make_finding1_corpus(17, true);
    DegradationReport gap = run_finding1_experiment(disjoint, 17, cfg);
    CHECK(gap.testSize > 0);
    CHECK(gap.trainDecrypted > 0);
    CHECK(gap.gap() >= 0.10);

    std::vector<FlowRecord> same = make_finding1_corpus(17, false);
    DegradationReport flat = run_finding1_experiment(same, 17, cfg);
    CHECK(flat.gap() < 0.02);
    CHECK(flat.gap() > -0.02);
}

TEST_CASE("bench report JSON carries per-case status and the aggregate table") {
    Config cfg;
    CorpusReport r = run_corpus(kCorpusDir, cfg);
    std::string j = report_to_json(r);
    CHECK(j.find("\"cases\"") != std::string::npos);
    CHECK(j.find("\"status\"") != std::string::npos);
    CHECK(j.find("\"accuracy\"") != std::string::npos);
    CHECK(j.find("\"falsePositives\"") != std::string::npos);
    CHECK(j.find("event_ordering_lowmem") != std::string::npos);
}

TEST_CASE("missing corpus directory yields an empty report, not a crash") {
    Config cfg;
    CorpusReport r = run_corpus("/nonexistent/corpus", cfg);
    CHECK(r.cases.empty());
}
