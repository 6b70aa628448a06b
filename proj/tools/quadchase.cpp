#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "quadchase/analysis.hpp"
#include "quadchase/chase.hpp"
#include "quadchase/gadgets.hpp"
#include "quadchase/model.hpp"
#include "quadchase/query.hpp"
#include "quadchase/report.hpp"
#include "quadchase/safety.hpp"
#include "quadchase/textio.hpp"

namespace {

using namespace quadchase;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitIo = 2;
constexpr int kExitFuel = 3;

struct CommonInputs {
    std::string dataPath, rulesPath;
    std::string lir = "simple";
    bool generalized = false;
    bool splitHeads = false;
    Fuel fuel;
};

void addCommonFlags(CLI::App* cmd, CommonInputs& in, bool dataRequired = true) {
    auto* data = cmd->add_option("--data", in.dataPath, "N-Quads data file");
    if (dataRequired) data->required();
    cmd->add_option("--rules", in.rulesPath, "bridge rule file");
    cmd->add_option("--lir", in.lir, "local inference pack: simple | rdfs-min")
        ->check(CLI::IsMember({"simple", "rdfs-min"}));
    cmd->add_flag("--generalized", in.generalized,
                  "accept literal subjects/predicates in data");
    cmd->add_flag("--split-heads", in.splitHeads,
                  "normalize rule heads into existential components before running");
    cmd->add_option("--fuel-iterations", in.fuel.maxIterations, "iteration budget");
    cmd->add_option("--fuel-quads", in.fuel.maxQuads, "quad budget");
}

void applyFuelEnv(Fuel& fuel) {
    if (const char* env = std::getenv("QUADCHASE_FUEL_ITERATIONS")) {
        try {
            fuel.maxIterations = std::stol(env);
        } catch (...) {
            throw std::runtime_error("bad QUADCHASE_FUEL_ITERATIONS value");
        }
    }
}

QuadSystem loadSystem(const CommonInputs& in) {
    QuadSystem qs;
    if (!in.dataPath.empty()) {
        NQuadsOptions nq;
        nq.generalized = in.generalized;
        qs.graph = parseNQuadsFile(in.dataPath, nq);
    }
    if (!in.rulesPath.empty()) qs.rules = parseRulesFile(in.rulesPath).rules;
    if (in.splitHeads) qs.rules = normalizeHeadPieces(qs.rules);
    if (in.lir != "simple") {
        int nextId = 0;
        for (const BridgeRule& r : qs.rules) nextId = std::max(nextId, r.id);
        auto lirRules = instantiateLir(lclosurePack(in.lir), systemContexts(qs), nextId + 1);
        qs.rules.insert(qs.rules.end(), lirRules.begin(), lirRules.end());
    }
    return qs;
}

std::string defaultPrefix(const CommonInputs& in) {
    std::string payload;
    if (!in.dataPath.empty()) payload += readFile(in.dataPath);
    if (!in.rulesPath.empty()) payload += readFile(in.rulesPath);
    std::ostringstream hex;
    hex << std::hex << (fnv1a64(payload) & 0xffffffffu);
    std::string stem = in.dataPath.empty()
                           ? "rules"
                           : std::filesystem::path(in.dataPath).stem().string();
    return stem + "-" + hex.str();
}

int runChase(const CommonInputs& in, const std::string& outPrefix) {
    QuadSystem qs = loadSystem(in);
    ChaseState st = runDChase(qs, in.fuel);

    std::string prefix = outPrefix.empty() ? defaultPrefix(in) : outPrefix;
    writeFile(prefix + ".dchase.nq", serializeNQuads(st.quads));
    writeFile(prefix + ".log.jsonl", serializeChaseLog(st));

    Json report = chaseReport(st);
    report["outputs"] = Json{{"dchase", prefix + ".dchase.nq"},
                             {"log", prefix + ".log.jsonl"}};
    std::cout << report.dump(2) << "\n";
    return st.status == ChaseStatus::Fixpoint ? kExitOk : kExitFuel;
}

int runClassify(const CommonInputs& in, const std::string& mode, bool universal, int rrBound) {
    QuadSystem qs = loadSystem(in);
    if (universal) qs.graph = criticalQuadGraph(qs.rules);

    ClassifyOptions opts;
    opts.restrictedBodyBound = rrBound;

    if (mode == "all") {
        Classification c = classify(qs, in.fuel, opts);
        std::cout << classificationReport(c).dump(2) << "\n";
        return kExitOk;
    }
    SafetyMode m = mode == "safe"    ? SafetyMode::Safe
                   : mode == "msafe" ? SafetyMode::MSafe
                                     : SafetyMode::CSafe;
    auto [res, st] = runAugmentedChase(qs, m, in.fuel);
    Json j;
    j["mode"] = mode;
    j["universal"] = universal;
    j[mode] = verdictName(res.verdict);
    j["chaseSize"] = res.chaseSize;
    RRInfo rr = checkRR(qs.rules, rrBound);
    j["rr"] = rr.rr;
    j["restrictedRR"] = rr.restrictedRR;
    if (res.witness) j["witness"] = witnessReport(*res.witness);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int runQuery(const CommonInputs& in, const std::string& queryPath, bool allowSkolem,
             const std::string& format) {
    QuadSystem qs = loadSystem(in);
    QueryDocument q = parseQueryFile(queryPath);
    ChaseState st = runDChase(qs, in.fuel);

    QueryOptions opts;
    opts.allowSkolemAnswers = allowSkolem;
    AnswerSet answers = evalSelect(q, st, opts);
    if (format == "tsv") {
        std::cout << answersToTsv(answers);
    } else {
        std::cout << answerReport(answers).dump(2) << "\n";
    }
    return st.status == ChaseStatus::Fixpoint ? kExitOk : kExitFuel;
}

int runTranslate(const CommonInputs& in, const std::string& fromRules,
                 const std::string& outPath) {
    if (!fromRules.empty()) {
        FeRuleDocument doc = parseFeRulesFile(fromRules);
        QuadSystem qs = translateFromRules(doc.rules);
        std::string prefix = outPath.empty()
                                 ? std::filesystem::path(fromRules).stem().string() + "-quads"
                                 : outPath;
        writeFile(prefix + ".rules", serializeRules(qs.rules));
        writeFile(prefix + ".nq", serializeNQuads(qs.graph));
        std::cout << "wrote " << prefix << ".rules and " << prefix << ".nq\n";
        return kExitOk;
    }
    QuadSystem qs = loadSystem(in);
    std::vector<FeRule> rules = translateToRules(qs);
    std::string text = serializeFeRules(rules);
    if (outPath.empty()) {
        std::cout << text;
    } else {
        writeFile(outPath, text);
        std::cout << "wrote " << outPath << "\n";
    }
    return kExitOk;
}

int runAnalyze(const CommonInputs& in, const std::string& feRulesPath,
               const std::string& outPrefix) {
    std::vector<FeRule> rules;
    if (!feRulesPath.empty()) {
        rules = parseFeRulesFile(feRulesPath).rules;
    } else {
        rules = translateToRules(loadSystem(in));
    }
    WaResult wa = weaklyAcyclic(rules);
    JaResult ja = jointlyAcyclic(rules);
    Verdict mfa = mfaCheck(rules, in.fuel);
    if (!outPrefix.empty()) {
        writeFile(outPrefix + ".positions.dot", positionGraphToDot(wa.graph));
        writeFile(outPrefix + ".edg.dot", edgToDot(ja));
    }
    std::cout << analysisReport(wa, ja, mfa).dump(2) << "\n";
    return kExitOk;
}

int runGen(const std::string& kind, const std::string& inputPath, int k,
           const std::string& outPrefix) {
    GadgetOutput out;
    Json input;
    if (!inputPath.empty()) input = Json::parse(readFile(inputPath));

    if (kind == "cfg-intersection") {
        out = genCFGIntersection(cfgFromJson(input.at("g1")), cfgFromJson(input.at("g2")));
    } else if (kind == "horn-sat") {
        out = genHornSat(clausesFromJson(input));
    } else if (kind == "three-color") {
        if (!inputPath.empty())
            out = genThreeColor(edgesFromJson(input));
        else
            out = genThreeColor(completeGraph(k));
    } else if (kind == "dtm") {
        out = genDTM(dtmFromJson(input), input.at("input").get<std::string>(),
                     input.at("n").get<int>());
    } else {
        throw std::runtime_error("unknown gadget: " + kind);
    }

    writeFile(outPrefix + ".nq", serializeNQuads(out.system.graph));
    writeFile(outPrefix + ".rules", serializeRules(out.system.rules));
    writeFile(outPrefix + ".query", serializeQuery(out.query));
    std::cout << "wrote " << outPrefix << ".nq/.rules/.query\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadchase: deterministic chase, safety analysis and query answering "
                 "for contextualized quads with forall-existential bridge rules"};
    app.require_subcommand(1);

    CommonInputs chaseIn, classifyIn, queryIn, translateIn, analyzeIn;
    std::string outPrefix, classifyMode = "all", queryPath, queryFormat = "json";
    std::string translateFrom, translateOut, analyzeFeRules, analyzeOut;
    std::string genInput, genOut = "gadget", genKind;
    bool universal = false, allowSkolem = false;
    int rrBound = 3, genK = 3;

    auto* chase = app.add_subcommand("chase", "compute the dChase and export it");
    addCommonFlags(chase, chaseIn);
    chase->add_option("--out-prefix", outPrefix, "output file prefix");

    auto* classify = app.add_subcommand("classify", "safe/msafe/csafe and RR classification");
    addCommonFlags(classify, classifyIn, false);
    classify->add_option("--mode", classifyMode, "safe | msafe | csafe | all")
        ->check(CLI::IsMember({"safe", "msafe", "csafe", "all"}));
    classify->add_flag("--universal", universal,
                       "classify the rules over their critical quad-graph");
    classify->add_option("--rr-bound", rrBound, "body-size bound for restricted RR");

    auto* query = app.add_subcommand("query", "answer a contextualized conjunctive query");
    addCommonFlags(query, queryIn);
    query->add_option("--query", queryPath, "query file")->required();
    query->add_flag("--allow-skolem-answers", allowSkolem,
                    "include Skolem blank nodes in free positions");
    query->add_option("--format", queryFormat, "json | tsv")
        ->check(CLI::IsMember({"json", "tsv"}));

    auto* translate = app.add_subcommand("translate",
                                         "translate to/from ternary forall-existential rules");
    addCommonFlags(translate, translateIn, false);
    translate->add_option("--from-rules", translateFrom,
                          "translate a forall-existential rule file to a quad-system");
    translate->add_option("--out", translateOut, "output path (or prefix with --from-rules)");

    auto* analyze = app.add_subcommand("analyze", "weak/joint/model-faithful acyclicity");
    addCommonFlags(analyze, analyzeIn, false);
    analyze->add_option("--rules-fe", analyzeFeRules, "forall-existential rule file");
    analyze->add_option("--out-prefix", analyzeOut, "write DOT graphs with this prefix");

    auto* gen = app.add_subcommand("gen", "generate a reduction gadget");
    gen->add_option("kind", genKind, "cfg-intersection | horn-sat | three-color | dtm")
        ->required();
    gen->add_option("--input", genInput, "JSON input description");
    gen->add_option("--k", genK, "complete-graph size for three-color");
    gen->add_option("--out-prefix", genOut, "output file prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (chase->parsed()) {
            applyFuelEnv(chaseIn.fuel);
            return runChase(chaseIn, outPrefix);
        }
        if (classify->parsed()) {
            applyFuelEnv(classifyIn.fuel);
            if (!universal && classifyIn.dataPath.empty() && classifyIn.rulesPath.empty())
                throw std::runtime_error("classify needs --data/--rules or --universal --rules");
            return runClassify(classifyIn, classifyMode, universal, rrBound);
        }
        if (query->parsed()) {
            applyFuelEnv(queryIn.fuel);
            return runQuery(queryIn, queryPath, allowSkolem, queryFormat);
        }
        if (translate->parsed()) return runTranslate(translateIn, translateFrom, translateOut);
        if (analyze->parsed()) {
            applyFuelEnv(analyzeIn.fuel);
            return runAnalyze(analyzeIn, analyzeFeRules, analyzeOut);
        }
        if (gen->parsed()) return runGen(genKind, genInput, genK, genOut);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const RuleError& e) {
        std::cerr << "rule error: " << e.what() << "\n";
        return kExitParse;
    } catch (const GadgetError& e) {
        std::cerr << "gadget error: " << e.what() << "\n";
        return kExitParse;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
