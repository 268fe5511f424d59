#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "leaksem/config.hpp"
#include "leaksem/flowstore.hpp"

namespace leaksem {

enum class FlowLabel { Legal, Illegal };

std::string to_string(FlowLabel l);
FlowLabel flow_label_from(const std::string& s);

// Splits a URL template on separator characters; "(.*)" wildcards and
// <DATATYPE> placeholders survive as single tokens.
std::vector<std::string> tokenize_url(const std::string& urlTemplate,
                                      const std::string& separators, bool lowercase = false);

struct TokenVocabulary {
    std::vector<std::string> tokens;  // descending document frequency, then lexicographic
    int minDf = 2;
    std::string separators;
    bool lowercase = false;

    std::map<std::string, int> index;  // token -> position
    int find(const std::string& t) const {
        auto it = index.find(t);
        return it == index.end() ? -1 : it->second;
    }
};

struct LabeledFlow {
    std::string urlTemplate;
    FlowLabel label;
};

TokenVocabulary build_vocabulary(const std::vector<LabeledFlow>& trainingFlows, int minDf,
                                 const std::string& separators, bool lowercase = false);

struct FeatureVector {
    std::vector<uint8_t> bits;  // aligned to vocabulary
    FlowLabel label = FlowLabel::Legal;
};

FeatureVector vectorize(const LabeledFlow& flow, const TokenVocabulary& vocab);

// Replicates the minority class (uniform with replacement, seeded) until class
// counts are equal. Training folds only.
std::vector<FeatureVector> oversample_minority(const std::vector<FeatureVector>& vectors,
                                               std::mt19937_64& rng);

struct TreeNode {
    bool leaf = false;
    int featureIndex = -1;   // internal: split feature
    int left = -1, right = -1;  // internal: child ids (left = absent, right = present)
    FlowLabel label = FlowLabel::Illegal;  // leaf
    int countLegal = 0, countIllegal = 0;  // leaf class counts
};

struct DecisionTreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    int maxDepth = 12;
    int minLeaf = 2;

    FlowLabel predict(const FeatureVector& v) const;
};

// Greedy CART induction with Gini impurity over binary features; ties broken
// toward the lowest feature index, leaf majority ties toward illegal.
DecisionTreeModel train_decision_tree(const std::vector<FeatureVector>& vectors,
                                      int maxDepth, int minLeaf);

double gini_impurity(int nLegal, int nIllegal);
// Weighted Gini of splitting `vectors` on `feature`; used both by training and
// by the exhaustive split oracle in the tests.
double split_gini(const std::vector<FeatureVector>& vectors, int feature);

struct ClassMetrics {
    long long tp = 0, fn = 0, fp = 0, tn = 0;
    double tpRate() const { return tp + fn ? (double)tp / (tp + fn) : 0.0; }
    double fpRate() const { return fp + tn ? (double)fp / (fp + tn) : 0.0; }
    double precision() const { return tp + fp ? (double)tp / (tp + fp) : 0.0; }
    double fMeasure() const {
        return 2 * tp + fp + fn ? (double)(2 * tp) / (2 * tp + fp + fn) : 0.0;
    }
};

struct EvalReport {
    ClassMetrics illegal, legal;  // each class taken as positive
    int folds = 0;
    long long total = 0;
    bool stratified = true;
    bool leakageGuardTriggered = false;  // instrumentation: test-fold data seen in training
    double accuracy() const {
        return total ? (double)(illegal.tp + illegal.tn) / total : 0.0;
    }
};

// Stratified k-fold cross-validation; vocabulary and oversampling are computed
// inside each training fold only.
EvalReport cross_validate(const std::vector<LabeledFlow>& dataset, const Config& cfg);

// host mode: sensitive records only; network mode: plus non-sensitive records
// in the legal class (capped by cfg.networkNonSensitiveCap when nonzero).
enum class DatasetMode { Host, Network };
std::vector<LabeledFlow> build_dataset(const std::vector<FlowRecord>& records,
                                       DatasetMode mode, const Config& cfg);

// Trained artifact: vocabulary + tree, versioned text format.
struct TrainedModel {
    TokenVocabulary vocab;
    DecisionTreeModel tree;

    FlowLabel predict_template(const std::string& urlTemplate) const;
};

TrainedModel train_model(const std::vector<LabeledFlow>& trainingFlows, const Config& cfg);

std::string serialize_model(const TrainedModel& m);
TrainedModel deserialize_model(const std::string& text);

}  // namespace leaksem
