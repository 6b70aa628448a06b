#include "quadchase/report.hpp"

namespace quadchase {

namespace {

const char* statusName(ChaseStatus s) {
    switch (s) {
        case ChaseStatus::Running: return "running";
        case ChaseStatus::Fixpoint: return "fixpoint";
        case ChaseStatus::FuelExhausted: return "fuel-exhausted";
        case ChaseStatus::Aborted: return "aborted";
    }
    return "?";
}

}  // namespace

Json witnessReport(const ViolationWitness& w) {
    Json j;
    j["mode"] = w.mode;
    j["ruleId"] = w.ruleId;
    j["frontierBlank"] = termToString(w.frontierBlank);
    j["descendant"] = termToString(w.descendant);
    std::vector<std::string> attempt, desc;
    for (const Term& t : w.attemptVector) attempt.push_back(termToString(t));
    for (const Term& t : w.descendantVector) desc.push_back(termToString(t));
    j["attemptVector"] = attempt;
    j["descendantVector"] = desc;
    std::vector<std::string> ctxs;
    for (const Term& c : w.descendantContexts) ctxs.push_back(c.lexical);
    j["descendantContexts"] = ctxs;
    return j;
}

Json chaseReport(const ChaseState& state) {
    Json j;
    j["status"] = statusName(state.status);
    j["iterations"] = state.iterations;
    j["quadCount"] = state.quads.size();
    j["skolemCount"] = state.skolems.size();
    Json perContext = Json::object();
    for (const Quad& q : state.quads) {
        std::string key = q.context.lexical;
        perContext[key] = perContext.value(key, 0) + 1;
    }
    j["quadsPerContext"] = perContext;
    Term bottom = Term::uri(reserved::bottom);
    j["inconsistent"] = state.contains(Quad{bottom, bottom, bottom, bottom});
    if (state.violation) j["violation"] = witnessReport(*state.violation);
    return j;
}

Json classificationReport(const Classification& c) {
    Json j;
    j["safe"] = verdictName(c.safe.verdict);
    j["msafe"] = verdictName(c.msafe.verdict);
    j["csafe"] = verdictName(c.csafe.verdict);
    j["rr"] = c.rr;
    j["restrictedRR"] = c.restrictedRR;
    j["maxBodySize"] = c.maxBodySize;
    j["augmentedChaseSize"] = c.augmentedChaseSize();
    Json sizes;
    sizes["safe"] = c.safe.chaseSize;
    sizes["msafe"] = c.msafe.chaseSize;
    sizes["csafe"] = c.csafe.chaseSize;
    j["augmentedChaseSizes"] = sizes;
    for (const auto* m : {&c.safe, &c.msafe, &c.csafe}) {
        if (m->witness) {
            j["witness"] = witnessReport(*m->witness);
            break;
        }
    }
    return j;
}

Json answerReport(const AnswerSet& answers) {
    Json j;
    std::vector<std::string> vars;
    for (const Term& v : answers.freeVars) vars.push_back("?" + v.lexical);
    j["vars"] = vars;
    Json rows = Json::array();
    for (const ConstantVector& row : answers.bindings) {
        Json r = Json::array();
        for (const Term& t : row) r.push_back(termToString(t));
        rows.push_back(r);
    }
    j["rows"] = rows;
    j["count"] = answers.bindings.size();
    j["complete"] = answers.complete;
    if (answers.freeVars.empty()) j["boolean"] = !answers.bindings.empty();
    return j;
}

Json analysisReport(const WaResult& wa, const JaResult& ja, Verdict mfa) {
    Json j;
    j["wa"] = wa.result;
    j["ja"] = ja.result;
    j["mfa"] = verdictName(mfa);
    if (wa.witnessCycle) {
        Json cycle = Json::array();
        for (const Position& p : *wa.witnessCycle)
            cycle.push_back("<" + p.first + "," + std::to_string(p.second) + ">");
        j["waWitnessCycle"] = cycle;
    }
    Json mov;
    for (const auto& [y, positions] : ja.movSets) {
        Json ps = Json::array();
        for (const Position& p : positions)
            ps.push_back(Json::array({p.first, p.second}));
        mov[y.var + "@r" + std::to_string(y.ruleId)] = ps;
    }
    j["mov"] = mov;
    return j;
}

std::string answersToTsv(const AnswerSet& answers) {
    std::string out;
    for (size_t i = 0; i < answers.freeVars.size(); ++i) {
        if (i) out += "\t";
        out += "?" + answers.freeVars[i].lexical;
    }
    out += "\n";
    for (const ConstantVector& row : answers.bindings) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += "\t";
            out += termToString(row[i]);
        }
        out += "\n";
    }
    return out;
}

}  // namespace quadchase
