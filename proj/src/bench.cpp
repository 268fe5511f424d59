#include "leaksem/bench.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "leaksem/catalog.hpp"
#include "leaksem/executor.hpp"
#include "leaksem/parser.hpp"

namespace leaksem {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

using FlowKey = std::tuple<std::string, std::vector<std::string>>;  // template, taint

std::string flow_key_text(const FlowKey& k) {
    std::string s = std::get<0>(k) + " {";
    bool first = true;
    for (const auto& t : std::get<1>(k)) {
        if (!first) s += ",";
        s += t;
        first = false;
    }
    return s + "}";
}

}  // namespace

std::vector<BenchCase> load_manifest(const std::string& manifestPath) {
    json j = json::parse(read_file(manifestPath));
    std::vector<BenchCase> cases;
    for (const auto& jc : j.at("cases")) {
        BenchCase bc;
        bc.id = jc.at("id").get<std::string>();
        bc.amlPath = jc.at("amlPath").get<std::string>();
        bc.category = jc.at("category").get<std::string>();
        bc.expectedMiss = jc.value("expectedMiss", false);
        for (const auto& jf : jc.value("expectedFlows", json::array())) {
            ExpectedFlow f;
            f.urlTemplate = jf.at("urlTemplate").get<std::string>();
            f.carriedTaint = jf.at("carriedTaint").get<std::vector<std::string>>();
            std::sort(f.carriedTaint.begin(), f.carriedTaint.end());
            f.sensitive = jf.value("sensitive", true);
            bc.expectedFlows.push_back(std::move(f));
        }
        bool noFlowCategory = bc.category == "noLeak" || bc.category == "infeasibleTrap";
        if (noFlowCategory != bc.expectedFlows.empty())
            throw std::runtime_error("manifest case " + bc.id + ": category " +
                                     bc.category +
                                     (noFlowCategory ? " must not list expected flows"
                                                     : " must list expected flows"));
        cases.push_back(std::move(bc));
    }
    return cases;
}

CaseResult run_case(const BenchCase& bc, const std::string& corpusDir, const Config& cfg) {
    CaseResult res;
    res.id = bc.id;
    try {
        ApiCatalog catalog = default_catalog();
        Program prog = parse_program(read_file(corpusDir + "/" + bc.amlPath), catalog);
        AnalysisResult ar = analyze_app(prog, catalog, cfg);

        std::set<FlowKey> actualSensitive, actualAll;
        for (const auto& ev : ar.sinks) {
            std::vector<std::string> taint(ev.carriedTaint.begin(), ev.carriedTaint.end());
            FlowKey k{ev.urlTemplate, taint};
            actualAll.insert(k);
            if (ev.sensitive) actualSensitive.insert(k);
        }
        std::set<FlowKey> expectedSensitive;
        std::vector<FlowKey> expectedNonSensitive;
        for (const auto& f : bc.expectedFlows) {
            FlowKey k{f.urlTemplate, f.carriedTaint};
            if (f.sensitive) expectedSensitive.insert(k);
            else expectedNonSensitive.push_back(k);
        }
        res.expectedSensitive = (int)expectedSensitive.size();
        std::vector<std::string> notes;
        int matched = 0;
        for (const auto& k : expectedSensitive) {
            if (actualSensitive.count(k)) ++matched;
            else notes.push_back("missing sensitive flow " + flow_key_text(k));
        }
        res.detectedSensitive = matched;
        for (const auto& k : actualSensitive) {
            if (!expectedSensitive.count(k)) {
                ++res.falsePositives;
                notes.push_back("unexpected sensitive flow " + flow_key_text(k));
            }
        }
        bool missingNonSensitive = false;
        for (const auto& k : expectedNonSensitive) {
            if (!actualAll.count(k)) {
                missingNonSensitive = true;
                notes.push_back("missing non-sensitive flow " + flow_key_text(k));
            }
        }

        if (bc.expectedMiss) {
            if (res.detectedSensitive > 0) {
                res.status = "falsePositive";
                notes.push_back("known-limitation case unexpectedly detected");
            } else {
                res.status = "pass";
                notes.push_back("missed as expected");
            }
        } else if (res.falsePositives > 0) {
            res.status = "falsePositive";
        } else if (res.detectedSensitive < res.expectedSensitive || missingNonSensitive) {
            res.status = "miss";
        } else {
            res.status = "pass";
        }
        std::string joined;
        for (const auto& n : notes) {
            if (!joined.empty()) joined += "; ";
            joined += n;
        }
        res.details = joined;
    } catch (const std::exception& e) {
        res.status = "error";
        res.details = e.what();
    }
    return res;
}

CorpusReport run_corpus(const std::string& corpusDir, const Config& cfg) {
    CorpusReport report;
    std::vector<BenchCase> cases;
    {
        std::ifstream probe(corpusDir + "/manifest.json");
        if (!probe) return report;  // empty corpus
    }
    cases = load_manifest(corpusDir + "/manifest.json");
    for (const auto& bc : cases) {
        CaseResult cr = run_case(bc, corpusDir, cfg);
        if (!bc.expectedMiss) {
            report.totalExpectedFlows += cr.expectedSensitive;
            report.detectedFlows += cr.detectedSensitive;
        }
        report.missedFlows += cr.expectedSensitive - cr.detectedSensitive;
        report.falsePositives += cr.falsePositives;
        report.cases.push_back(std::move(cr));
    }
    return report;
}

std::string report_to_json(const CorpusReport& report) {
    json j;
    j["cases"] = json::array();
    for (const auto& c : report.cases) {
        j["cases"].push_back({{"id", c.id},
                              {"status", c.status},
                              {"details", c.details},
                              {"expectedSensitive", c.expectedSensitive},
                              {"detectedSensitive", c.detectedSensitive},
                              {"falsePositives", c.falsePositives}});
    }
    j["aggregate"] = {{"totalExpectedFlows", report.totalExpectedFlows},
                      {"detectedFlows", report.detectedFlows},
                      {"missedFlows", report.missedFlows},
                      {"falsePositives", report.falsePositives},
                      {"accuracy", report.accuracy()},
                      {"precision", report.precision()}};
    return j.dump(2) + "\n";
}

DegradationReport run_finding1_experiment(const std::vector<FlowRecord>& flows,
                                          uint64_t seed, const Config& cfg) {
    std::vector<LabeledFlow> unenc;
    std::vector<LabeledFlow> dec;
    for (const auto& r : flows) {
        if (r.label != "legal" && r.label != "illegal") continue;
        LabeledFlow f{r.urlTemplate, flow_label_from(r.label)};
        (r.hostnameDecrypted ? dec : unenc).push_back(f);
    }
    if (unenc.empty() || dec.size() < 4)
        throw std::invalid_argument(
            "experiment needs unencrypted flows and at least 4 decrypted flows");

    std::mt19937_64 rng(seed);
    std::vector<size_t> order(dec.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<LabeledFlow> decTrain, test;
    for (size_t i = 0; i < order.size(); ++i)
        (i % 2 == 0 ? decTrain : test).push_back(dec[order[i]]);

    TrainedModel a = train_model(unenc, cfg);
    std::vector<LabeledFlow> mixed = unenc;
    mixed.insert(mixed.end(), decTrain.begin(), decTrain.end());
    TrainedModel b = train_model(mixed, cfg);

    int okA = 0, okB = 0;
    for (const auto& f : test) {
        if (a.predict_template(f.urlTemplate) == f.label) ++okA;
        if (b.predict_template(f.urlTemplate) == f.label) ++okB;
    }
    DegradationReport rep;
    rep.testSize = (int)test.size();
    rep.trainUnencrypted = (int)unenc.size();
    rep.trainDecrypted = (int)decTrain.size();
    rep.accuracyUnencryptedOnly = test.empty() ? 0.0 : (double)okA / test.size();
    rep.accuracyMixed = test.empty() ? 0.0 : (double)okB / test.size();
    return rep;
}

namespace {

FlowRecord synthetic_flow(const std::string& tmpl, const std::string& label,
                          bool decrypted, int idx) {
    FlowRecord r;
    r.appId = "synthetic-" + std::to_string(idx);
    r.component = "Synth";
    r.trace = {"onCreate"};
    r.sinkApi = "openConnection";
    r.url = tmpl;
    r.urlTemplate = tmpl;
    r.carriedTaint = {"IMEI"};
    r.sensitive = true;
    r.label = label;
    r.hostnameDecrypted = decrypted;
    return r;
}

}  // namespace

std::vector<FlowRecord> make_classifier_corpus(uint64_t seed, int perClass) {
    std::mt19937_64 rng(seed);
    const std::vector<std::string> illegalHosts = {
        "ads.mobpush.com",  "track.clickwin.net", "stats.admogo.cn",
        "count.adfeed.com", "banner.pushmob.net", "impress.adnest.cn"};
    const std::vector<std::string> illegalPaths = {
        "ad?&uid=<IMEI>",         "imp?&device=<IMEI>&slot=(.*)",
        "click?&id=<IMEI>",       "collect?&lat=<LOCATION_LAT>&lon=<LOCATION_LON>",
        "push?&token=<IMEI>",     "beacon?&sid=(.*)&uid=<IMEI>"};
    const std::vector<std::string> legalHosts = {
        "api.openweathermap.org", "maps.geoquery.com", "search.newsbee.jp",
        "sync.notesafe.io",       "api.recipebox.org", "feed.podhub.com"};
    const std::vector<std::string> legalPaths = {
        "forecast?&lon=<LOCATION_LON>", "route?&from=<LOCATION_LAT>&to=(.*)",
        "search?&q=(.*)",               "login?&device=<IMEI>",
        "weather?&city=(.*)",           "nearby?&lat=<LOCATION_LAT>"};

    std::vector<FlowRecord> out;
    auto emit = [&](const std::vector<std::string>& hosts,
                    const std::vector<std::string>& paths, const std::string& label) {
        std::uniform_int_distribution<size_t> ph(0, hosts.size() - 1);
        std::uniform_int_distribution<size_t> pp(0, paths.size() - 1);
        for (int i = 0; i < perClass; ++i)
            out.push_back(synthetic_flow(hosts[ph(rng)] + "/" + paths[pp(rng)], label,
                                         false, (int)out.size()));
    };
    emit(illegalHosts, illegalPaths, "illegal");
    emit(legalHosts, legalPaths, "legal");
    return out;
}

std::vector<FlowRecord> make_finding1_corpus(uint64_t seed, bool disjointPools,
                                             int perGroup) {
    std::mt19937_64 rng(seed);
    const std::vector<std::string> unencIllegalHosts = {
        "ads.mobpush.com", "track.clickwin.net", "stats.admogo.cn", "count.adfeed.com"};
    const std::vector<std::string> unencLegalHosts = {
        "api.openweathermap.org", "maps.geoquery.com", "search.newsbee.jp",
        "sync.notesafe.io"};
    // Decrypted-host pools share no informative token with the unencrypted ones.
    const std::vector<std::string> decIllegalHosts = {
        "xml.meego91.com", "c2.stealthnet.cn", "relay.gongfu188.com", "drop.kunfu66.net"};
    const std::vector<std::string> decLegalHosts = {
        "mail.plainbox.org", "store.bookmart.jp", "cloud.fitjournal.io",
        "news.dailyowl.com"};

    // Path tokens are only weakly informative so the unencrypted-only model has
    // little to fall back on for out-of-vocabulary hosts.
    const std::string illegalPath = "report?&id=<IMEI>";
    const std::string legalPath = "query?&loc=<LOCATION_LAT>";
    const std::string neutralPath = "data?&v=(.*)";
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<FlowRecord> out;
    auto emit = [&](const std::vector<std::string>& hosts, const std::string& label,
                    bool decrypted) {
        std::uniform_int_distribution<size_t> ph(0, hosts.size() - 1);
        const std::string& informative = label == "illegal" ? illegalPath : legalPath;
        for (int i = 0; i < perGroup; ++i) {
            const std::string& path = coin(rng) < 0.65 ? informative : neutralPath;
            out.push_back(synthetic_flow(hosts[ph(rng)] + "/" + path, label, decrypted,
                                         (int)out.size()));
        }
    };
    emit(unencIllegalHosts, "illegal", false);
    emit(unencLegalHosts, "legal", false);
    emit(disjointPools ? decIllegalHosts : unencIllegalHosts, "illegal", true);
    emit(disjointPools ? decLegalHosts : unencLegalHosts, "legal", true);
    return out;
}

}  // namespace leaksem
