#include "textclust/report.hpp"

namespace textclust {

using nlohmann::json;

json report_to_json(const EvalReport& report) {
    return json{{"acc", report.acc},
                {"nmi", report.nmi},
                {"n", report.n},
                {"confusion", report.confusion},
                {"mapping", report.mapping}};
}

EvalReport report_from_json(const json& j) {
    EvalReport r;
    r.acc = j.at("acc").get<double>();
    r.nmi = j.at("nmi").get<double>();
    r.n = j.at("n").get<std::size_t>();
    r.confusion = j.at("confusion").get<CountMatrix>();
    r.mapping = j.at("mapping").get<std::vector<int>>();
    return r;
}

json epoch_to_json(const EpochRecord& record) {
    json j{{"epoch", record.epoch},
           {"contrastive", record.loss.contrastive},
           {"clustering", record.loss.clustering},
           {"total", record.loss.total},
           {"tau", record.loss.tau}};
    j["batch_acc"] = record.batch_acc ? json(*record.batch_acc) : json(nullptr);
    j["batch_nmi"] = record.batch_nmi ? json(*record.batch_nmi) : json(nullptr);
    return j;
}

json run_to_json(const RunResult& run, const json& config) {
    json j;
    j["config"] = config;
    j["trace"] = json::array();
    for (const auto& rec : run.trace) j["trace"].push_back(epoch_to_json(rec));
    j["labels"] = run.labels.labels;
    j["k"] = run.labels.k;
    j["report"] = run.report ? report_to_json(*run.report) : json(nullptr);
    j["wall_time_s"] = run.wall_time_s;
    return j;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace textclust
