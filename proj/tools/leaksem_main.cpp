#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "leaksem/bench.hpp"
#include "leaksem/callgraph.hpp"
#include "leaksem/catalog.hpp"
#include "leaksem/classifier.hpp"
#include "leaksem/config.hpp"
#include "leaksem/executor.hpp"
#include "leaksem/flowstore.hpp"
#include "leaksem/parser.hpp"

namespace fs = std::filesystem;
using namespace leaksem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << content;
}

// key=value lines; '#' comments. Flags given on the command line win because
// they are applied by CLI11 after these defaults.
void apply_config_file(Config& cfg, const std::string& path) {
    std::istringstream is(read_file(path));
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(n) +
                                     ": expected key=value");
        auto trim = [](std::string s) {
            size_t x = s.find_first_not_of(" \t\r");
            size_t y = s.find_last_not_of(" \t\r");
            return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        auto as_int = [&] { return std::stoll(val); };
        auto as_bool = [&] { return val == "1" || val == "true" || val == "yes"; };
        if (key == "maxTraces") cfg.maxTraces = (int)as_int();
        else if (key == "maxTraceLen") cfg.maxTraceLen = (int)as_int();
        else if (key == "maxPathsPerTrace") cfg.maxPathsPerTrace = (int)as_int();
        else if (key == "maxUnknownDepth") cfg.maxUnknownDepth = (int)as_int();
        else if (key == "symbolicArrayLen") cfg.symbolicArrayLen = (int)as_int();
        else if (key == "minDf") cfg.minDf = (int)as_int();
        else if (key == "k") cfg.k = (int)as_int();
        else if (key == "seed") cfg.seed = (uint64_t)as_int();
        else if (key == "separators") cfg.separators = val;
        else if (key == "lowercase") cfg.lowercase = as_bool();
        else if (key == "maxDepth") cfg.maxDepth = (int)as_int();
        else if (key == "minLeaf") cfg.minLeaf = (int)as_int();
        else if (key == "strictDecrypt") cfg.strictDecrypt = as_bool();
        else if (key == "networkNonSensitiveCap") cfg.networkNonSensitiveCap = (int)as_int();
        else if (key == "mode")
            cfg.mode = val == "sink-reach" ? AnalysisMode::SinkReach : AnalysisMode::Full;
        else
            throw std::runtime_error(path + ":" + std::to_string(n) +
                                     ": unknown config key " + key);
    }
}

void validate_budgets(const Config& cfg) {
    if (cfg.maxTraces < 1 || cfg.maxTraceLen < 1 || cfg.maxPathsPerTrace < 1 ||
        cfg.maxUnknownDepth < 1 || cfg.symbolicArrayLen < 1 || cfg.k < 1 ||
        cfg.minDf < 1 || cfg.maxDepth < 1 || cfg.minLeaf < 1)
        throw std::runtime_error("all budgets must be >= 1");
}

struct AnalyzeOutcome {
    std::vector<FlowRecord> flows;
    bool budgetExceeded = false;
};

AnalyzeOutcome analyze_paths(const std::vector<std::string>& amlFiles,
                             const ApiCatalog& catalog, const Config& cfg) {
    AnalyzeOutcome out;
    for (const auto& path : amlFiles) {
        Program prog = parse_program(read_file(path), catalog);
        std::string appId = prog.name.empty() ? fs::path(path).stem().string() : prog.name;
        AnalysisResult r = analyze_app(prog, catalog, cfg);
        for (const auto& e : r.errors) std::cerr << "warn: " << appId << ": " << e << "\n";
        out.budgetExceeded = out.budgetExceeded || r.stats.pathBudgetExceeded ||
                             r.stats.traceBudgetExceeded;
        for (const auto& ev : r.sinks) out.flows.push_back(to_flow_record(ev, appId));
    }
    out.flows = dedup_flows(out.flows);
    return out;
}

std::vector<std::string> expand_input(const std::string& input) {
    std::vector<std::string> files;
    if (fs::is_directory(input)) {
        for (const auto& e : fs::directory_iterator(input))
            if (e.path().extension() == ".aml") files.push_back(e.path().string());
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(input);
    }
    if (files.empty()) throw std::runtime_error("no .aml inputs under " + input);
    return files;
}

json flow_summary(const std::vector<FlowRecord>& flows) {
    int sensitive = 0, decrypted = 0;
    std::map<std::string, int> byLabel;
    std::map<std::string, int> byTaint;
    std::set<std::string> apps;
    for (const auto& f : flows) {
        apps.insert(f.appId);
        if (f.sensitive) ++sensitive;
        if (f.hostnameDecrypted) ++decrypted;
        ++byLabel[f.label];
        for (const auto& t : f.carriedTaint) ++byTaint[t];
    }
    return json{{"flows", flows.size()},
                {"apps", apps.size()},
                {"sensitive", sensitive},
                {"hostnameDecrypted", decrypted},
                {"byLabel", byLabel},
                {"byDataType", byTaint}};
}

int run(int argc, char** argv) {
    CLI::App app{"hybrid taint analysis and URL classification for AML app models"};
    app.require_subcommand(1);

    Config cfg;
    // config files are applied before parsing so explicit flags override them
    std::string configPath;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) apply_config_file(cfg, argv[i + 1]);
        else if (a.rfind("--config=", 0) == 0) apply_config_file(cfg, a.substr(9));
    }
    app.add_option("--config", configPath, "key=value config file (flags override)");

    // analyze
    auto* cmdAnalyze = app.add_subcommand("analyze", "run the pipeline on an app or directory");
    std::string anInput, anOut, anCatalog, anMode = "full";
    cmdAnalyze->add_option("input", anInput, "app.aml file or directory")->required();
    cmdAnalyze->add_option("--out", anOut, "flow records (JSONL; default: stdout)");
    cmdAnalyze->add_option("--catalog", anCatalog, "API catalog file (default: built-in)");
    cmdAnalyze->add_option("--mode", anMode, "full | sink-reach")
        ->check(CLI::IsMember({"full", "sink-reach"}));
    cmdAnalyze->add_option("--max-traces", cfg.maxTraces, "trace budget per app");
    cmdAnalyze->add_option("--max-paths", cfg.maxPathsPerTrace, "path budget per trace");
    cmdAnalyze->add_flag("--strict-decrypt", cfg.strictDecrypt,
                         "fail on decrypt-table misses");

    // graph
    auto* cmdGraph = app.add_subcommand("graph", "emit per-component call graphs");
    std::string grInput, grCatalog;
    bool grDot = false;
    cmdGraph->add_option("input", grInput, "app.aml file")->required();
    cmdGraph->add_flag("--dot", grDot, "DOT output (the only supported format)");
    cmdGraph->add_option("--catalog", grCatalog, "API catalog file");

    // bench
    auto* cmdBench = app.add_subcommand("bench", "run the benchmark corpus");
    std::string beDir, beReport, beMode = "full", beFinding1, beEmit, beEmitOut;
    cmdBench->add_option("corpusDir", beDir, "corpus directory with manifest.json");
    cmdBench->add_option("--report", beReport, "report JSON output path");
    cmdBench->add_option("--mode", beMode, "full | sink-reach")
        ->check(CLI::IsMember({"full", "sink-reach"}));
    cmdBench->add_option("--finding1", beFinding1,
                         "labeled flows JSONL for the encrypted-host degradation experiment");
    cmdBench->add_option("--emit-synthetic", beEmit,
                         "write a synthetic labeled corpus: classifier | finding1 | finding1-samepool")
        ->check(CLI::IsMember({"classifier", "finding1", "finding1-samepool"}));
    cmdBench->add_option("--emit-out", beEmitOut, "output path for --emit-synthetic");
    cmdBench->add_option("--seed", cfg.seed, "experiment seed");

    // train
    auto* cmdTrain = app.add_subcommand("train", "train and evaluate the URL classifier");
    std::string trFlows, trLabels, trMode = "host", trModel, trReport;
    cmdTrain->add_option("--flows", trFlows, "flow records (JSONL)")->required();
    cmdTrain->add_option("--labels", trLabels, "label manifest (pattern<TAB>label)");
    cmdTrain->add_option("--mode", trMode, "host | network")
        ->check(CLI::IsMember({"host", "network"}));
    cmdTrain->add_option("--model", trModel, "model output path");
    cmdTrain->add_option("--report", trReport, "cross-validation report JSON path");
    cmdTrain->add_option("--k", cfg.k, "cross-validation folds");
    cmdTrain->add_option("--seed", cfg.seed, "shuffle/oversampling seed");
    cmdTrain->add_option("--min-df", cfg.minDf, "token document-frequency threshold");
    cmdTrain->add_option("--max-depth", cfg.maxDepth, "tree depth limit");
    cmdTrain->add_option("--min-leaf", cfg.minLeaf, "minimum instances per leaf");
    cmdTrain->add_flag("--lowercase", cfg.lowercase, "lowercase URLs before tokenizing");
    cmdTrain->add_option("--non-sensitive-cap", cfg.networkNonSensitiveCap,
                         "cap on non-sensitive flows in network mode (0 = all)");

    // classify
    auto* cmdClassify = app.add_subcommand("classify", "predict labels for flows");
    std::string clModel, clFlows;
    cmdClassify->add_option("--model", clModel, "trained model file")->required();
    cmdClassify->add_option("--flows", clFlows, "flow records (JSONL)")->required();

    // report
    auto* cmdReport = app.add_subcommand("report", "summarize (and optionally label) flows");
    std::string rpFlows, rpLabels, rpOut;
    cmdReport->add_option("--flows", rpFlows, "flow records (JSONL)")->required();
    cmdReport->add_option("--labels", rpLabels, "label manifest to apply");
    cmdReport->add_option("--out", rpOut, "write (re)labeled flows here");

    for (auto* sc : app.get_subcommands(nullptr)) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);  // prints usage to stderr
        return rc == 0 ? 0 : 1;
    }
    validate_budgets(cfg);

    if (*cmdAnalyze) {
        if (anMode == "sink-reach") cfg.mode = AnalysisMode::SinkReach;
        ApiCatalog fileCatalog;
        const ApiCatalog* catalog = &default_catalog();
        if (!anCatalog.empty()) {
            fileCatalog = load_api_catalog(read_file(anCatalog));
            catalog = &fileCatalog;
        }
        AnalyzeOutcome out = analyze_paths(expand_input(anInput), *catalog, cfg);
        if (anOut.empty()) std::cout << export_flows(out.flows);
        else export_flows_file(out.flows, anOut);
        std::cerr << "analyzed " << anInput << ": " << out.flows.size() << " flow records"
                  << (out.budgetExceeded ? " (budget exceeded, partial)" : "") << "\n";
        return out.budgetExceeded ? 2 : 0;
    }

    if (*cmdGraph) {
        (void)grDot;
        ApiCatalog fileCatalog;
        const ApiCatalog* catalog = &default_catalog();
        if (!grCatalog.empty()) {
            fileCatalog = load_api_catalog(read_file(grCatalog));
            catalog = &fileCatalog;
        }
        Program prog = parse_program(read_file(grInput), *catalog);
        for (const auto& c : prog.components)
            std::cout << to_dot(build_call_graph(c, *catalog));
        return 0;
    }

    if (*cmdBench) {
        if (!beEmit.empty()) {
            if (beEmitOut.empty())
                throw std::runtime_error("--emit-synthetic requires --emit-out");
            std::vector<FlowRecord> flows =
                beEmit == "classifier"
                    ? make_classifier_corpus(cfg.seed)
                    : make_finding1_corpus(cfg.seed, beEmit == "finding1");
            export_flows_file(flows, beEmitOut);
            std::cerr << "wrote " << flows.size() << " synthetic flows to " << beEmitOut
                      << "\n";
            return 0;
        }
        if (!beFinding1.empty()) {
            DegradationReport rep =
                run_finding1_experiment(import_flows_file(beFinding1), cfg.seed, cfg);
            json j{{"accuracyUnencryptedOnly", rep.accuracyUnencryptedOnly},
                   {"accuracyMixed", rep.accuracyMixed},
                   {"gap", rep.gap()},
                   {"testSize", rep.testSize},
                   {"trainUnencrypted", rep.trainUnencrypted},
                   {"trainDecrypted", rep.trainDecrypted}};
            std::string text = j.dump(2) + "\n";
            if (beReport.empty()) std::cout << text;
            else write_file(beReport, text);
            return 0;
        }
        if (beDir.empty()) throw std::runtime_error("bench needs a corpus directory");
        if (beMode == "sink-reach") cfg.mode = AnalysisMode::SinkReach;
        CorpusReport report = run_corpus(beDir, cfg);
        std::string text = report_to_json(report);
        if (beReport.empty()) std::cout << text;
        else write_file(beReport, text);
        std::cerr << "corpus: " << report.cases.size() << " cases, accuracy "
                  << report.accuracy() << ", false positives " << report.falsePositives
                  << "\n";
        return 0;
    }

    if (*cmdTrain) {
        std::vector<FlowRecord> flows = import_flows_file(trFlows);
        if (!trLabels.empty()) {
            LabelStats ls = label_flows(flows, parse_label_manifest(read_file(trLabels)));
            std::cerr << "labeled " << ls.labeled << ", unmatched " << ls.unmatched
                      << ", collisions " << ls.collisions << "\n";
        }
        DatasetMode mode = trMode == "network" ? DatasetMode::Network : DatasetMode::Host;
        std::vector<LabeledFlow> dataset = build_dataset(flows, mode, cfg);
        if (dataset.empty()) throw std::runtime_error("dataset is empty after filtering");
        EvalReport ev = cross_validate(dataset, cfg);
        json j{{"folds", ev.folds},
               {"total", ev.total},
               {"stratified", ev.stratified},
               {"accuracy", ev.accuracy()},
               {"illegal",
                {{"tpRate", ev.illegal.tpRate()},
                 {"fpRate", ev.illegal.fpRate()},
                 {"precision", ev.illegal.precision()},
                 {"fMeasure", ev.illegal.fMeasure()},
                 {"tp", ev.illegal.tp},
                 {"fn", ev.illegal.fn},
                 {"fp", ev.illegal.fp},
                 {"tn", ev.illegal.tn}}},
               {"legal",
                {{"tpRate", ev.legal.tpRate()},
                 {"fpRate", ev.legal.fpRate()},
                 {"precision", ev.legal.precision()},
                 {"fMeasure", ev.legal.fMeasure()},
                 {"tp", ev.legal.tp},
                 {"fn", ev.legal.fn},
                 {"fp", ev.legal.fp},
                 {"tn", ev.legal.tn}}}};
        std::string text = j.dump(2) + "\n";
        if (trReport.empty()) std::cout << text;
        else write_file(trReport, text);
        if (!trModel.empty()) {
            TrainedModel m = train_model(dataset, cfg);
            write_file(trModel, serialize_model(m));
            std::cerr << "model written to " << trModel << " (" << m.vocab.tokens.size()
                      << " tokens)\n";
        }
        return 0;
    }

    if (*cmdClassify) {
        TrainedModel m = deserialize_model(read_file(clModel));
        for (const auto& f : import_flows_file(clFlows))
            std::cout << f.urlTemplate << "\t" << to_string(m.predict_template(f.urlTemplate))
                      << "\n";
        return 0;
    }

    if (*cmdReport) {
        std::vector<FlowRecord> flows = import_flows_file(rpFlows);
        json j;
        if (!rpLabels.empty()) {
            LabelStats ls = label_flows(flows, parse_label_manifest(read_file(rpLabels)));
            j["labeling"] = {{"labeled", ls.labeled},
                             {"unmatched", ls.unmatched},
                             {"collisions", ls.collisions}};
        }
        j["summary"] = flow_summary(flows);
        std::cout << j.dump(2) << "\n";
        if (!rpOut.empty()) export_flows_file(flows, rpOut);
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "error: line " << e.pos.line << ", col " << e.pos.col << ": "
                  << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
