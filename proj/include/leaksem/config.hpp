#pragma once

#include <cstdint>
#include <set>
#include <string>

namespace leaksem {

enum class AnalysisMode { Full, SinkReach };

struct Config {
    int maxTraces = 64;
    int maxTraceLen = 8;
    int maxPathsPerTrace = 256;
    int maxUnknownDepth = 16;
    int maxConcreteLoopIters = 4096;
    int symbolicArrayLen = 4;       // fallback when the catalog gives no elementCount
    bool strictDecrypt = false;     // decryptTable miss: error instead of fresh symbolic
    AnalysisMode mode = AnalysisMode::Full;

    // classifier
    int minDf = 2;
    int k = 10;
    uint64_t seed = 1;
    std::string separators = "./?&=:_,;";
    bool lowercase = false;
    int maxDepth = 12;
    int minLeaf = 2;
    // network mode: cap on non-sensitive flows added to the legal class (0 = all)
    int networkNonSensitiveCap = 0;
};

}  // namespace leaksem
