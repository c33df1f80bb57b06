#pragma once

#include <string>

#include <json.hpp>

#include "textclust/metrics.hpp"
#include "textclust/trainer.hpp"

namespace textclust {

// {acc, confusion, mapping, n, nmi}
nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

nlohmann::json epoch_to_json(const EpochRecord& record);

// The run as JSON with `config` holding the caller's config echo. Object keys
// are sorted, so identical runs differ only in wall_time_s.
nlohmann::json run_to_json(const RunResult& run, const nlohmann::json& config);

// Two-space indented, trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace textclust
