#include "leaksem/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace leaksem {

std::string to_string(FlowLabel l) { return l == FlowLabel::Legal ? "legal" : "illegal"; }

FlowLabel flow_label_from(const std::string& s) {
    if (s == "legal") return FlowLabel::Legal;
    if (s == "illegal") return FlowLabel::Illegal;
    throw std::runtime_error("unknown label " + s);
}

std::vector<std::string> tokenize_url(const std::string& urlTemplate,
                                      const std::string& separators, bool lowercase) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) tokens.push_back(cur);
        cur.clear();
    };
    for (size_t i = 0; i < urlTemplate.size();) {
        // wildcard and placeholder segments survive as single tokens
        if (urlTemplate.compare(i, 4, "(.*)") == 0) {
            flush();
            tokens.push_back("(.*)");
            i += 4;
            continue;
        }
        if (urlTemplate[i] == '<') {
            size_t close = urlTemplate.find('>', i);
            if (close != std::string::npos) {
                flush();
                tokens.push_back(urlTemplate.substr(i, close - i + 1));
                i = close + 1;
                continue;
            }
        }
        char c = urlTemplate[i];
        if (separators.find(c) != std::string::npos) {
            flush();
        } else {
            cur += lowercase ? (char)std::tolower((unsigned char)c) : c;
        }
        ++i;
    }
    flush();
    return tokens;
}

TokenVocabulary build_vocabulary(const std::vector<LabeledFlow>& trainingFlows, int minDf,
                                 const std::string& separators, bool lowercase) {
    if (trainingFlows.empty()) throw std::invalid_argument("empty training set");
    std::map<std::string, int> df;
    for (const auto& f : trainingFlows) {
        std::set<std::string> distinct;
        for (const auto& t : tokenize_url(f.urlTemplate, separators, lowercase))
            distinct.insert(t);
        for (const auto& t : distinct) ++df[t];
    }
    std::vector<std::pair<std::string, int>> kept;
    for (const auto& [t, n] : df)
        if (n >= minDf) kept.emplace_back(t, n);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    TokenVocabulary v;
    v.minDf = minDf;
    v.separators = separators;
    v.lowercase = lowercase;
    for (const auto& [t, n] : kept) {
        v.index[t] = (int)v.tokens.size();
        v.tokens.push_back(t);
    }
    return v;
}

FeatureVector vectorize(const LabeledFlow& flow, const TokenVocabulary& vocab) {
    FeatureVector fv;
    fv.bits.assign(vocab.tokens.size(), 0);
    fv.label = flow.label;
    for (const auto& t : tokenize_url(flow.urlTemplate, vocab.separators, vocab.lowercase)) {
        int idx = vocab.find(t);
        if (idx >= 0) fv.bits[idx] = 1;  // binary presence, not counts
    }
    return fv;
}

std::vector<FeatureVector> oversample_minority(const std::vector<FeatureVector>& vectors,
                                               std::mt19937_64& rng) {
    std::vector<size_t> legal, illegal;
    for (size_t i = 0; i < vectors.size(); ++i)
        (vectors[i].label == FlowLabel::Legal ? legal : illegal).push_back(i);
    if (legal.empty() || illegal.empty())
        throw std::invalid_argument("oversampling needs both classes present");
    if (legal.size() == illegal.size()) return vectors;

    const auto& minority = legal.size() < illegal.size() ? legal : illegal;
    size_t deficit = (legal.size() < illegal.size() ? illegal.size() : legal.size()) -
                     minority.size();
    std::vector<FeatureVector> out = vectors;
    std::uniform_int_distribution<size_t> pick(0, minority.size() - 1);
    for (size_t k = 0; k < deficit; ++k) out.push_back(vectors[minority[pick(rng)]]);
    return out;
}

double gini_impurity(int nLegal, int nIllegal) {
    double n = nLegal + nIllegal;
    if (n == 0) return 0.0;
    double pl = nLegal / n, pi = nIllegal / n;
    return 1.0 - pl * pl - pi * pi;
}

double split_gini(const std::vector<FeatureVector>& vectors, int feature) {
    int lL = 0, lI = 0, rL = 0, rI = 0;  // absent / present
    for (const auto& v : vectors) {
        bool present = v.bits[feature] != 0;
        bool legal = v.label == FlowLabel::Legal;
        if (present) (legal ? rL : rI)++;
        else (legal ? lL : lI)++;
    }
    double n = (double)vectors.size();
    return (lL + lI) / n * gini_impurity(lL, lI) + (rL + rI) / n * gini_impurity(rL, rI);
}

FlowLabel DecisionTreeModel::predict(const FeatureVector& v) const {
    int cur = 0;
    while (!nodes[cur].leaf) {
        int f = nodes[cur].featureIndex;
        bool present = f < (int)v.bits.size() && v.bits[f] != 0;
        cur = present ? nodes[cur].right : nodes[cur].left;
    }
    return nodes[cur].label;
}

namespace {

int build_node(DecisionTreeModel& model, const std::vector<FeatureVector>& all,
               std::vector<size_t> idxs, int depth) {
    int nLegal = 0, nIllegal = 0;
    for (size_t i : idxs)
        (all[i].label == FlowLabel::Legal ? nLegal : nIllegal)++;

    auto make_leaf = [&]() {
        TreeNode node;
        node.leaf = true;
        node.countLegal = nLegal;
        node.countIllegal = nIllegal;
        // Majority label; ties go to illegal (fail-safe).
        node.label = nLegal > nIllegal ? FlowLabel::Legal : FlowLabel::Illegal;
        model.nodes.push_back(node);
        return (int)model.nodes.size() - 1;
    };

    size_t nFeatures = idxs.empty() ? 0 : all[idxs[0]].bits.size();
    if (nLegal == 0 || nIllegal == 0 || depth >= model.maxDepth ||
        (int)idxs.size() < 2 * model.minLeaf || nFeatures == 0)
        return make_leaf();

    double nodeGini = gini_impurity(nLegal, nIllegal);
    int bestFeature = -1;
    double bestGini = nodeGini;
    for (size_t f = 0; f < nFeatures; ++f) {
        int absent = 0, present = 0;
        for (size_t i : idxs) (all[i].bits[f] ? present : absent)++;
        if (absent < model.minLeaf || present < model.minLeaf) continue;
        int lL = 0, lI = 0, rL = 0, rI = 0;
        for (size_t i : idxs) {
            bool p = all[i].bits[f] != 0;
            bool legal = all[i].label == FlowLabel::Legal;
            if (p) (legal ? rL : rI)++;
            else (legal ? lL : lI)++;
        }
        double n = (double)idxs.size();
        double g = (lL + lI) / n * gini_impurity(lL, lI) +
                   (rL + rI) / n * gini_impurity(rL, rI);
        if (g < bestGini - 1e-12) {  // strict improvement; ties keep lowest index
            bestGini = g;
            bestFeature = (int)f;
        }
    }
    if (bestFeature < 0) return make_leaf();

    std::vector<size_t> leftIdx, rightIdx;
    for (size_t i : idxs)
        (all[i].bits[bestFeature] ? rightIdx : leftIdx).push_back(i);

    TreeNode node;
    node.featureIndex = bestFeature;
    model.nodes.push_back(node);
    int self = (int)model.nodes.size() - 1;
    int left = build_node(model, all, std::move(leftIdx), depth + 1);
    int right = build_node(model, all, std::move(rightIdx), depth + 1);
    model.nodes[self].left = left;
    model.nodes[self].right = right;
    return self;
}

}  // namespace

DecisionTreeModel train_decision_tree(const std::vector<FeatureVector>& vectors,
                                      int maxDepth, int minLeaf) {
    bool hasLegal = false, hasIllegal = false;
    for (const auto& v : vectors)
        (v.label == FlowLabel::Legal ? hasLegal : hasIllegal) = true;
    if (!hasLegal || !hasIllegal)
        throw std::invalid_argument("training data must contain both classes");

    DecisionTreeModel model;
    model.maxDepth = maxDepth;
    model.minLeaf = minLeaf;
    std::vector<size_t> idxs(vectors.size());
    for (size_t i = 0; i < idxs.size(); ++i) idxs[i] = i;
    int root = build_node(model, vectors, std::move(idxs), 0);
    // Root is built first but children append after; index 0 is always the root.
    (void)root;
    return model;
}

EvalReport cross_validate(const std::vector<LabeledFlow>& dataset, const Config& cfg) {
    int k = cfg.k;
    if ((int)dataset.size() < k)
        throw std::invalid_argument("dataset smaller than fold count");

    std::mt19937_64 rng(cfg.seed);
    std::vector<size_t> legal, illegal;
    for (size_t i = 0; i < dataset.size(); ++i)
        (dataset[i].label == FlowLabel::Legal ? legal : illegal).push_back(i);

    EvalReport report;
    report.folds = k;
    report.stratified = (int)legal.size() >= k && (int)illegal.size() >= k;

    std::vector<int> foldOf(dataset.size(), 0);
    if (report.stratified) {
        std::shuffle(legal.begin(), legal.end(), rng);
        std::shuffle(illegal.begin(), illegal.end(), rng);
        for (size_t i = 0; i < legal.size(); ++i) foldOf[legal[i]] = (int)(i % k);
        for (size_t i = 0; i < illegal.size(); ++i) foldOf[illegal[i]] = (int)(i % k);
    } else {
        // Too few members in a class for stratification; plain shuffled folds.
        std::vector<size_t> all(dataset.size());
        for (size_t i = 0; i < all.size(); ++i) all[i] = i;
        std::shuffle(all.begin(), all.end(), rng);
        for (size_t i = 0; i < all.size(); ++i) foldOf[all[i]] = (int)(i % k);
    }

    long long predII = 0, predIL = 0, predLI = 0, predLL = 0;
    for (int fold = 0; fold < k; ++fold) {
        std::vector<LabeledFlow> train;
        std::vector<size_t> testIdx;
        for (size_t i = 0; i < dataset.size(); ++i) {
            if (foldOf[i] == fold) testIdx.push_back(i);
            else train.push_back(dataset[i]);
        }
        if (testIdx.empty() || train.empty()) continue;

        TokenVocabulary vocab =
            build_vocabulary(train, cfg.minDf, cfg.separators, cfg.lowercase);

        // Leakage instrumentation: the vocabulary must not contain tokens that
        // occur only in the held-out fold.
        std::set<std::string> trainTokens;
        for (const auto& f : train)
            for (const auto& t : tokenize_url(f.urlTemplate, cfg.separators, cfg.lowercase))
                trainTokens.insert(t);
        for (const auto& t : vocab.tokens)
            if (!trainTokens.count(t)) report.leakageGuardTriggered = true;

        std::vector<FeatureVector> trainVecs;
        for (const auto& f : train) trainVecs.push_back(vectorize(f, vocab));
        bool both = false, seenL = false, seenI = false;
        for (const auto& v : trainVecs) {
            (v.label == FlowLabel::Legal ? seenL : seenI) = true;
        }
        both = seenL && seenI;
        if (both) {
            std::mt19937_64 foldRng(cfg.seed + 0x9e3779b97f4a7c15ULL * (fold + 1));
            trainVecs = oversample_minority(trainVecs, foldRng);
        }

        DecisionTreeModel tree = both
            ? train_decision_tree(trainVecs, cfg.maxDepth, cfg.minLeaf)
            : DecisionTreeModel{};
        if (!both) {
            TreeNode leaf;
            leaf.leaf = true;
            leaf.label = seenI ? FlowLabel::Illegal : FlowLabel::Legal;
            tree.nodes.push_back(leaf);
        }

        for (size_t i : testIdx) {
            FeatureVector v = vectorize(dataset[i], vocab);
            FlowLabel pred = tree.predict(v);
            bool actualIll = dataset[i].label == FlowLabel::Illegal;
            bool predIll = pred == FlowLabel::Illegal;
            if (actualIll && predIll) ++predII;
            else if (actualIll) ++predIL;
            else if (predIll) ++predLI;
            else ++predLL;
        }
    }

    report.total = predII + predIL + predLI + predLL;
    report.illegal = {predII, predIL, predLI, predLL};
    report.legal = {predLL, predLI, predIL, predII};
    return report;
}

std::vector<LabeledFlow> build_dataset(const std::vector<FlowRecord>& records,
                                       DatasetMode mode, const Config& cfg) {
    std::vector<LabeledFlow> out;
    for (const auto& r : records) {
        if (!r.sensitive) continue;
        if (r.label != "legal" && r.label != "illegal") continue;
        out.push_back({r.urlTemplate, flow_label_from(r.label)});
    }
    if (mode == DatasetMode::Network) {
        int added = 0;
        for (const auto& r : records) {
            if (r.sensitive) continue;
            if (cfg.networkNonSensitiveCap > 0 && added >= cfg.networkNonSensitiveCap)
                break;
            out.push_back({r.urlTemplate, FlowLabel::Legal});
            ++added;
        }
    }
    return out;
}

TrainedModel train_model(const std::vector<LabeledFlow>& trainingFlows, const Config& cfg) {
    TrainedModel m;
    m.vocab = build_vocabulary(trainingFlows, cfg.minDf, cfg.separators, cfg.lowercase);
    std::vector<FeatureVector> vecs;
    for (const auto& f : trainingFlows) vecs.push_back(vectorize(f, m.vocab));
    std::mt19937_64 rng(cfg.seed);
    vecs = oversample_minority(vecs, rng);
    m.tree = train_decision_tree(vecs, cfg.maxDepth, cfg.minLeaf);
    return m;
}

FlowLabel TrainedModel::predict_template(const std::string& urlTemplate) const {
    LabeledFlow f{urlTemplate, FlowLabel::Legal};
    return tree.predict(vectorize(f, vocab));
}

std::string serialize_model(const TrainedModel& m) {
    std::ostringstream os;
    os << "leaksem-model v1\n";
    os << "separators " << m.vocab.separators << "\n";
    os << "lowercase " << (m.vocab.lowercase ? 1 : 0) << "\n";
    os << "minDf " << m.vocab.minDf << "\n";
    os << "vocab " << m.vocab.tokens.size() << "\n";
    for (const auto& t : m.vocab.tokens) os << t << "\n";
    os << "tree " << m.tree.nodes.size() << " " << m.tree.maxDepth << " "
       << m.tree.minLeaf << "\n";
    for (const auto& n : m.tree.nodes) {
        if (n.leaf)
            os << "L " << to_string(n.label) << " " << n.countLegal << " "
               << n.countIllegal << "\n";
        else
            os << "I " << n.featureIndex << " " << n.left << " " << n.right << "\n";
    }
    return os.str();
}

TrainedModel deserialize_model(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    auto need = [&](const std::string& what) -> std::string {
        if (!std::getline(is, line))
            throw std::runtime_error("model file truncated, expected " + what);
        return line;
    };
    if (need("header") != "leaksem-model v1")
        throw std::runtime_error("unsupported model file version");
    TrainedModel m;
    {
        std::string l = need("separators");
        if (l.rfind("separators ", 0) != 0) throw std::runtime_error("bad separators line");
        m.vocab.separators = l.substr(11);
    }
    {
        std::istringstream ls(need("lowercase"));
        std::string kw;
        int v;
        ls >> kw >> v;
        m.vocab.lowercase = v != 0;
    }
    {
        std::istringstream ls(need("minDf"));
        std::string kw;
        ls >> kw >> m.vocab.minDf;
    }
    size_t nTokens;
    {
        std::istringstream ls(need("vocab"));
        std::string kw;
        ls >> kw >> nTokens;
    }
    for (size_t i = 0; i < nTokens; ++i) {
        std::string t = need("vocab token");
        m.vocab.index[t] = (int)m.vocab.tokens.size();
        m.vocab.tokens.push_back(t);
    }
    size_t nNodes;
    {
        std::istringstream ls(need("tree"));
        std::string kw;
        ls >> kw >> nNodes >> m.tree.maxDepth >> m.tree.minLeaf;
    }
    for (size_t i = 0; i < nNodes; ++i) {
        std::istringstream ls(need("tree node"));
        std::string tag;
        ls >> tag;
        TreeNode n;
        if (tag == "L") {
            n.leaf = true;
            std::string lbl;
            ls >> lbl >> n.countLegal >> n.countIllegal;
            n.label = flow_label_from(lbl);
        } else if (tag == "I") {
            ls >> n.featureIndex >> n.left >> n.right;
        } else {
            throw std::runtime_error("bad tree node line: " + line);
        }
        m.tree.nodes.push_back(n);
    }
    return m;
}

}  // namespace leaksem
