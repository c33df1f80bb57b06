#include "textclust/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace textclust {

namespace {

constexpr std::array<const char*, 4> kAgNewsClasses = {"World", "Sports", "Business", "Sci/Tech"};
constexpr int kStackOverflowClasses = 20;

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

void check_limit(std::optional<std::size_t> limit) {
    if (limit && *limit == 0) throw std::invalid_argument("limit must be positive");
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::optional<int> parse_int(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

// Reads one RFC 4180 record; quoted fields may span lines. Returns false at EOF.
bool read_csv_record(std::istream& in, std::size_t& line_no, std::vector<std::string>& fields,
                     std::size_t& record_line) {
    fields.clear();
    std::string line;
    if (!std::getline(in, line)) return false;
    ++line_no;
    record_line = line_no;
    strip_cr(line);

    std::string field;
    bool in_quotes = false;
    bool was_quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i == line.size()) {
            if (in_quotes) {
                if (!std::getline(in, line)) {
                    throw std::runtime_error("line " + std::to_string(record_line) + ": unterminated quoted field");
                }
                ++line_no;
                strip_cr(line);
                field.push_back('\n');
                i = 0;
                continue;
            }
            fields.push_back(std::move(field));
            return true;
        }
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            if (!field.empty() || was_quoted) {
                throw std::runtime_error("line " + std::to_string(record_line) + ": stray quote in field");
            }
            in_quotes = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            was_quoted = false;
        } else {
            if (was_quoted) {
                throw std::runtime_error("line " + std::to_string(record_line) + ": text after closing quote");
            }
            field.push_back(c);
        }
        ++i;
    }
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string flatten_whitespace(std::string s) {
    for (char& c : s)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return s;
}

std::string ascii_lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

std::string remove_punctuation(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (!(static_cast<unsigned char>(c) < 0x80 && std::ispunct(static_cast<unsigned char>(c)))) out.push_back(c);
    return out;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

bool contains_sequence(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

}  // namespace

bool Corpus::has_labels() const {
    return !documents.empty() &&
           std::all_of(documents.begin(), documents.end(), [](const Document& d) { return d.label.has_value(); });
}

std::vector<int> Corpus::labels() const {
    std::vector<int> out;
    out.reserve(documents.size());
    for (const auto& d : documents) {
        if (!d.label) throw std::invalid_argument("document " + std::to_string(d.id) + " has no label");
        out.push_back(*d.label);
    }
    return out;
}

void Corpus::validate() const {
    if (num_classes && *num_classes <= 0) throw std::invalid_argument("num_classes must be positive");
    for (std::size_t i = 0; i < documents.size(); ++i) {
        const auto& d = documents[i];
        if (i > 0 && d.id <= documents[i - 1].id) {
            throw std::invalid_argument("document ids not strictly increasing at position " + std::to_string(i));
        }
        if (d.label && (*d.label < 0 || (num_classes && *d.label >= *num_classes))) {
            throw std::invalid_argument("document " + std::to_string(d.id) + " has out-of-range label " +
                                        std::to_string(*d.label));
        }
    }
}

Corpus load_agnews(const std::filesystem::path& path, std::optional<std::size_t> limit) {
    check_limit(limit);
    auto in = open_input(path);
    Corpus corpus;
    corpus.num_classes = static_cast<int>(kAgNewsClasses.size());
    corpus.source_tag = "agnews";

    std::vector<std::string> fields;
    std::size_t line_no = 0;
    std::size_t record_line = 0;
    while ((!limit || corpus.size() < *limit) && read_csv_record(in, line_no, fields, record_line)) {
        if (fields.size() == 1 && is_blank(fields[0])) continue;
        if (fields.size() != 3) {
            throw std::runtime_error("line " + std::to_string(record_line) + ": expected 3 columns, got " +
                                     std::to_string(fields.size()));
        }
        const auto cls = parse_int(fields[0]);
        if (!cls) throw std::runtime_error("line " + std::to_string(record_line) + ": bad class index '" + fields[0] + "'");
        if (*cls < 1 || *cls > 4) {
            throw std::runtime_error("line " + std::to_string(record_line) + ": class index " + std::to_string(*cls) +
                                     " outside 1..4");
        }
        Document doc;
        doc.id = corpus.size();
        doc.text = flatten_whitespace(fields[1]);
        doc.label = *cls - 1;
        doc.class_name = kAgNewsClasses[*cls - 1];
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

Corpus load_stackoverflow(const std::filesystem::path& tsv_path, std::optional<std::size_t> limit) {
    check_limit(limit);
    auto in = open_input(tsv_path);
    Corpus corpus;
    corpus.num_classes = kStackOverflowClasses;
    corpus.source_tag = "stackoverflow";

    std::string line;
    std::size_t line_no = 0;
    while ((!limit || corpus.size() < *limit) && std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (is_blank(line)) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected label<TAB>title");
        }
        const auto label = parse_int(std::string_view(line).substr(0, tab));
        if (!label || *label < 0 || *label >= kStackOverflowClasses) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": label outside 0..19");
        }
        Document doc;
        doc.id = corpus.size();
        doc.text = flatten_whitespace(line.substr(tab + 1));
        doc.label = *label;
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

Corpus load_stackoverflow(const std::filesystem::path& titles_path, const std::filesystem::path& labels_path,
                          std::optional<std::size_t> limit) {
    check_limit(limit);
    auto read_lines = [](const std::filesystem::path& p) {
        auto in = open_input(p);
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line)) {
            strip_cr(line);
            lines.push_back(std::move(line));
        }
        while (!lines.empty() && lines.back().empty()) lines.pop_back();
        return lines;
    };
    const auto titles = read_lines(titles_path);
    const auto labels = read_lines(labels_path);
    if (titles.size() != labels.size()) {
        throw std::runtime_error("count mismatch " + std::to_string(titles.size()) + " vs " +
                                 std::to_string(labels.size()));
    }

    Corpus corpus;
    corpus.num_classes = kStackOverflowClasses;
    corpus.source_tag = "stackoverflow";
    const std::size_t n = limit ? std::min(*limit, titles.size()) : titles.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto label = parse_int(labels[i]);
        if (!label || *label < 1 || *label > kStackOverflowClasses) {
            throw std::runtime_error(labels_path.string() + " line " + std::to_string(i + 1) + ": label outside 1..20");
        }
        Document doc;
        doc.id = i;
        doc.text = flatten_whitespace(titles[i]);
        doc.label = *label - 1;
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    return tokens;
}

std::optional<Document> preprocess(const Document& doc, const PreprocessRules& rules) {
    const bool normalize = rules.lowercase || rules.strip_punctuation;
    std::string text = doc.text;
    if (rules.lowercase) text = ascii_lower(text);
    if (rules.strip_punctuation) text = remove_punctuation(text);
    const auto tokens = tokenize(text);

    if (tokens.empty() || tokens.size() < rules.min_tokens) return std::nullopt;

    if (!rules.relevance_keywords.empty()) {
        const auto lowered = tokenize(ascii_lower(text));
        const bool relevant =
            std::any_of(rules.relevance_keywords.begin(), rules.relevance_keywords.end(), [&](const std::string& kw) {
                std::string k = ascii_lower(kw);
                if (rules.strip_punctuation) k = remove_punctuation(k);
                return contains_sequence(lowered, tokenize(k));
            });
        if (!relevant) return std::nullopt;
    }

    Document out = doc;
    if (normalize) out.text = join(tokens);
    return out;
}

Corpus preprocess_corpus(const Corpus& corpus, const PreprocessRules& rules) {
    Corpus out;
    out.num_classes = corpus.num_classes;
    out.source_tag = corpus.source_tag;
    for (const auto& d : corpus.documents)
        if (auto p = preprocess(d, rules)) out.documents.push_back(std::move(*p));
    return out;
}

Corpus dedup(const Corpus& corpus) {
    Corpus out;
    out.num_classes = corpus.num_classes;
    out.source_tag = corpus.source_tag;
    std::unordered_set<std::string> seen;
    for (const auto& d : corpus.documents)
        if (seen.insert(d.text).second) out.documents.push_back(d);
    return out;
}

std::string serialize_corpus(const Corpus& corpus) {
    std::ostringstream out;
    out << "#textclust-corpus\tsource=" << flatten_whitespace(corpus.source_tag) << "\tnum_classes="
        << (corpus.num_classes ? std::to_string(*corpus.num_classes) : "?") << '\n';
    for (const auto& d : corpus.documents) {
        out << d.id << '\t' << (d.label ? std::to_string(*d.label) : "-") << '\t' << flatten_whitespace(d.text) << '\n';
    }
    return out.str();
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << serialize_corpus(corpus);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Corpus load_corpus(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("#textclust-corpus", 0) != 0) {
        throw std::runtime_error(path.string() + ": not a cleaned corpus file");
    }
    strip_cr(line);
    Corpus corpus;
    std::istringstream header(line);
    std::string part;
    while (std::getline(header, part, '\t')) {
        if (part.rfind("source=", 0) == 0) corpus.source_tag = part.substr(7);
        if (part.rfind("num_classes=", 0) == 0 && part.substr(12) != "?") {
            corpus.num_classes = parse_int(part.substr(12));
            if (!corpus.num_classes) throw std::runtime_error(path.string() + ": bad num_classes in header");
        }
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw std::runtime_error("line " + std::to_string(line_no) + ": expected 3 columns");
        Document d;
        std::uint64_t id = 0;
        const auto id_str = std::string_view(line).substr(0, t1);
        auto [ptr, ec] = std::from_chars(id_str.data(), id_str.data() + id_str.size(), id);
        if (ec != std::errc() || ptr != id_str.data() + id_str.size()) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": bad id");
        }
        d.id = id;
        const auto label_str = line.substr(t1 + 1, t2 - t1 - 1);
        if (label_str != "-") {
            d.label = parse_int(label_str);
            if (!d.label) throw std::runtime_error("line " + std::to_string(line_no) + ": bad label");
        }
        d.text = line.substr(t2 + 1);
        corpus.documents.push_back(std::move(d));
    }
    corpus.validate();
    return corpus;
}

}  // namespace textclust
