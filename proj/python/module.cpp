#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "leaksem/bench.hpp"
#include "leaksem/callgraph.hpp"
#include "leaksem/catalog.hpp"
#include "leaksem/classifier.hpp"
#include "leaksem/config.hpp"
#include "leaksem/executor.hpp"
#include "leaksem/flowstore.hpp"
#include "leaksem/parser.hpp"

namespace py = pybind11;
using namespace leaksem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

Config make_config(const py::kwargs& kw) {
    Config cfg;
    for (auto item : kw) {
        auto key = item.first.cast<std::string>();
        if (key == "max_traces") cfg.maxTraces = item.second.cast<int>();
        else if (key == "max_paths") cfg.maxPathsPerTrace = item.second.cast<int>();
        else if (key == "strict_decrypt") cfg.strictDecrypt = item.second.cast<bool>();
        else if (key == "mode")
            cfg.mode = item.second.cast<std::string>() == "sink-reach"
                           ? AnalysisMode::SinkReach
                           : AnalysisMode::Full;
        else if (key == "min_df") cfg.minDf = item.second.cast<int>();
        else if (key == "k") cfg.k = item.second.cast<int>();
        else if (key == "seed") cfg.seed = item.second.cast<uint64_t>();
        else if (key == "lowercase") cfg.lowercase = item.second.cast<bool>();
        else if (key == "max_depth") cfg.maxDepth = item.second.cast<int>();
        else if (key == "min_leaf") cfg.minLeaf = item.second.cast<int>();
        else throw std::invalid_argument("unknown option " + key);
    }
    return cfg;
}

py::dict flow_to_dict(const FlowRecord& f) {
    py::dict d;
    d["appId"] = f.appId;
    d["component"] = f.component;
    d["trace"] = f.trace;
    d["sinkApi"] = f.sinkApi;
    d["url"] = f.url;
    d["urlTemplate"] = f.urlTemplate;
    d["carriedTaint"] = f.carriedTaint;
    d["sensitive"] = f.sensitive;
    d["pathConstraint"] = f.pathConstraint;
    d["label"] = f.label;
    d["hostnameDecrypted"] = f.hostnameDecrypted;
    return d;
}

py::list analyze_source(const std::string& text, const py::kwargs& kw) {
    Config cfg = make_config(kw);
    const ApiCatalog& catalog = default_catalog();
    Program prog = parse_program(text, catalog);
    AnalysisResult r = analyze_app(prog, catalog, cfg);
    std::vector<FlowRecord> flows;
    for (const auto& ev : r.sinks) flows.push_back(to_flow_record(ev, prog.name));
    py::list out;
    for (const auto& f : dedup_flows(flows)) out.append(flow_to_dict(f));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "taint analysis and URL classification over AML app models";

    m.def("analyze_source", &analyze_source, py::arg("text"),
          "Run the full pipeline on AML source text; returns deduplicated flow dicts.");

    m.def(
        "analyze_file",
        [](const std::string& path, const py::kwargs& kw) {
            return analyze_source(read_file(path), kw);
        },
        py::arg("path"));

    m.def(
        "graph_dot",
        [](const std::string& text) {
            Program prog = parse_program(text, default_catalog());
            std::string out;
            for (const auto& c : prog.components)
                out += to_dot(build_call_graph(c, default_catalog()));
            return out;
        },
        py::arg("text"), "Per-component call graphs in DOT format.");

    m.def(
        "tokenize_url",
        [](const std::string& url, const std::string& separators, bool lowercase) {
            return tokenize_url(url, separators, lowercase);
        },
        py::arg("url"), py::arg("separators") = std::string("./?&=:_,;"),
        py::arg("lowercase") = false);

    m.def(
        "train_and_eval",
        [](const std::string& flowsPath, const std::string& mode, const py::kwargs& kw) {
            Config cfg = make_config(kw);
            std::vector<FlowRecord> flows = import_flows_file(flowsPath);
            DatasetMode dm = mode == "network" ? DatasetMode::Network : DatasetMode::Host;
            EvalReport ev = cross_validate(build_dataset(flows, dm, cfg), cfg);
            py::dict d;
            d["accuracy"] = ev.accuracy();
            d["folds"] = ev.folds;
            d["total"] = ev.total;
            d["stratified"] = ev.stratified;
            py::dict ill, leg;
            ill["tpRate"] = ev.illegal.tpRate();
            ill["fpRate"] = ev.illegal.fpRate();
            ill["precision"] = ev.illegal.precision();
            ill["fMeasure"] = ev.illegal.fMeasure();
            leg["tpRate"] = ev.legal.tpRate();
            leg["fpRate"] = ev.legal.fpRate();
            leg["precision"] = ev.legal.precision();
            leg["fMeasure"] = ev.legal.fMeasure();
            d["illegal"] = ill;
            d["legal"] = leg;
            return d;
        },
        py::arg("flows_path"), py::arg("mode") = std::string("host"),
        "Stratified cross-validation over labeled flows from a JSONL file.");

    m.def(
        "classify_url",
        [](const std::string& modelPath, const std::string& urlTemplate) {
            TrainedModel model = deserialize_model(read_file(modelPath));
            return to_string(model.predict_template(urlTemplate));
        },
        py::arg("model_path"), py::arg("url_template"));

    m.def(
        "run_corpus",
        [](const std::string& corpusDir, const std::string& mode) {
            Config cfg;
            if (mode == "sink-reach") cfg.mode = AnalysisMode::SinkReach;
            return report_to_json(run_corpus(corpusDir, cfg));
        },
        py::arg("corpus_dir"), py::arg("mode") = std::string("full"),
        "Benchmark corpus run; returns the report as a JSON string.");
}
