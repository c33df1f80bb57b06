#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace textclust {

struct Document {
    std::uint64_t id = 0;
    std::string text;
    std::optional<int> label;  // 0-based class index
    std::optional<std::string> class_name;

    friend bool operator==(const Document&, const Document&) = default;
};

struct Corpus {
    std::vector<Document> documents;
    std::optional<int> num_classes;
    std::string source_tag;

    std::size_t size() const { return documents.size(); }
    bool has_labels() const;
    std::vector<int> labels() const;
    // Throws if ids are not strictly increasing or labels fall outside [0, num_classes).
    void validate() const;

    friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct PreprocessRules {
    bool lowercase = true;
    bool strip_punctuation = true;
    std::vector<std::string> relevance_keywords;  // empty keeps everything
    std::size_t min_tokens = 1;

    static PreprocessRules none() { return {false, false, {}, 0}; }

    friend bool operator==(const PreprocessRules&, const PreprocessRules&) = default;
};

// AgNews CSV: "class-index","title","description", classes 1..4. Text is the title.
Corpus load_agnews(const std::filesystem::path& path, std::optional<std::size_t> limit = std::nullopt);

// StackOverflow as a two-column TSV (label<TAB>title); labels are taken as
// 0-based class indices in [0, 20).
Corpus load_stackoverflow(const std::filesystem::path& tsv_path, std::optional<std::size_t> limit = std::nullopt);

// StackOverflow as paired files: one title per line and one label per line.
// The label file uses the published 1..20 convention and is shifted to 0-based.
Corpus load_stackoverflow(const std::filesystem::path& titles_path, const std::filesystem::path& labels_path,
                          std::optional<std::size_t> limit = std::nullopt);

std::vector<std::string> tokenize(const std::string& text);

// Normalizes text per the rules and drops documents that fail the relevance
// keywords or the token minimum. With lowercase and strip_punctuation both off
// the text is passed through unchanged.
std::optional<Document> preprocess(const Document& doc, const PreprocessRules& rules);
Corpus preprocess_corpus(const Corpus& corpus, const PreprocessRules& rules);

// Removes exact duplicate texts, keeping the first occurrence.
Corpus dedup(const Corpus& corpus);

// Cleaned-corpus TSV: a header line, then "id<TAB>label<TAB>text" with "-" for
// a missing label. Tabs and newlines inside text are written as spaces.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string serialize_corpus(const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& path);

}  // namespace textclust
