#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "textclust/corpus.hpp"
#include "textclust/trainer.hpp"

namespace textclust {

// Raised for malformed config text and for unknown keys or bad values.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SourceKind { blobs, agnews, stackoverflow, corpus, embeddings };

std::string to_string(SourceKind kind);
SourceKind parse_source(const std::string& name);

struct DataConfig {
    SourceKind source = SourceKind::blobs;
    std::string path;         // input file in the format named by `source`
    std::string labels_path;  // stackoverflow label file, or integer labels for an EMB1 file
    std::optional<std::size_t> limit;
    bool preprocess = false;  // apply [preprocess] rules and dedup after loading text

    friend bool operator==(const DataConfig&, const DataConfig&) = default;
};

struct RunConfig {
    DataConfig data;
    PreprocessRules preprocess;
    BlobSpec blobs;
    TrainConfig train;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Flat TOML subset with [section] headers and `key = value` lines.
//   values:   42  1e-5  true  "text"  ["a", "b"]
//   comments: '#' to end of line
// Unknown keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string to_toml(const RunConfig& config);

// `section.key=value`, value in the same syntax as the file (strings may be bare).
void apply_override(RunConfig& config, const std::string& assignment);

std::vector<std::string> config_keys();

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

// Materializes the configured data source as training input.
TrainData load_data(const RunConfig& config);
Corpus load_text_corpus(const RunConfig& config);

// One integer per line; blank trailing lines ignored.
std::vector<int> load_label_file(const std::filesystem::path& path);
void save_label_file(const std::vector<int>& labels, const std::filesystem::path& path);

}  // namespace textclust
