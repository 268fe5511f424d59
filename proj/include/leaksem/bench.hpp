#pragma once

#include <random>
#include <string>
#include <vector>

#include "leaksem/classifier.hpp"
#include "leaksem/config.hpp"
#include "leaksem/flowstore.hpp"

namespace leaksem {

struct ExpectedFlow {
    std::string urlTemplate;
    std::vector<std::string> carriedTaint;  // sorted
    bool sensitive = true;
};

struct BenchCase {
    std::string id;
    std::string amlPath;
    std::vector<ExpectedFlow> expectedFlows;
    bool expectedMiss = false;  // known-limitation case
    std::string category;       // eventOrdering, logicBomb, timeBomb, loopBomb,
                                // infeasibleTrap, encryptedHost, plainLeak, noLeak
};

struct CaseResult {
    std::string id;
    std::string status;  // pass | miss | falsePositive | error
    std::string details;
    int expectedSensitive = 0;
    int detectedSensitive = 0;
    int falsePositives = 0;
};

struct CorpusReport {
    std::vector<CaseResult> cases;
    int totalExpectedFlows = 0;  // sensitive flows on non-expectedMiss cases
    int detectedFlows = 0;
    int missedFlows = 0;  // across all cases, expectedMiss included
    int falsePositives = 0;
    double accuracy() const {
        return totalExpectedFlows ? (double)detectedFlows / totalExpectedFlows : 1.0;
    }
    double precision() const {
        int d = detectedFlows + falsePositives;
        return d ? (double)detectedFlows / d : 1.0;
    }
};

std::vector<BenchCase> load_manifest(const std::string& manifestPath);
CaseResult run_case(const BenchCase& bc, const std::string& corpusDir, const Config& cfg);
CorpusReport run_corpus(const std::string& corpusDir, const Config& cfg);
std::string report_to_json(const CorpusReport& report);

struct DegradationReport {
    double accuracyUnencryptedOnly = 0.0;  // model A
    double accuracyMixed = 0.0;            // model B
    double gap() const { return accuracyMixed - accuracyUnencryptedOnly; }
    int testSize = 0;
    int trainUnencrypted = 0;
    int trainDecrypted = 0;  // decrypted flows added to model B's training set
};

// Trains one model on unencrypted flows only and one on the mixed set, then
// evaluates both on a held-out decrypted-host test set.
DegradationReport run_finding1_experiment(const std::vector<FlowRecord>& flows,
                                          uint64_t seed, const Config& cfg);

// Synthetic labeled corpora used by the evaluation harness.
std::vector<FlowRecord> make_classifier_corpus(uint64_t seed, int perClass = 100);
// disjointPools: decrypted-host flows use host tokens absent from the
// unencrypted population (the distribution-shift condition).
std::vector<FlowRecord> make_finding1_corpus(uint64_t seed, bool disjointPools,
                                             int perGroup = 60);

}  // namespace leaksem
