#include "textclust/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "textclust/embed.hpp"

namespace textclust {

using nlohmann::json;

std::string to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::blobs: return "blobs";
        case SourceKind::agnews: return "agnews";
        case SourceKind::stackoverflow: return "stackoverflow";
        case SourceKind::corpus: return "corpus";
        case SourceKind::embeddings: return "embeddings";
    }
    return "unknown";
}

SourceKind parse_source(const std::string& name) {
    for (auto k : {SourceKind::blobs, SourceKind::agnews, SourceKind::stackoverflow, SourceKind::corpus,
                   SourceKind::embeddings})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown data source '" + name +
                                "' (expected blobs, agnews, stackoverflow, corpus, embeddings)");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

// Reads a quoted string starting at s[pos] == '"'; pos ends past the closing quote.
std::string read_quoted(const std::string& s, std::size_t& pos) {
    std::string out;
    ++pos;
    while (pos < s.size()) {
        const char c = s[pos++];
        if (c == '"') return out;
        if (c != '\\') {
            out += c;
            continue;
        }
        if (pos >= s.size()) break;
        const char e = s[pos++];
        switch (e) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            default: throw std::invalid_argument(std::string("unknown escape \\") + e);
        }
    }
    throw std::invalid_argument("unterminated string");
}

// Drops a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\\' && in_string) {
            ++i;
        } else if (line[i] == '"') {
            in_string = !in_string;
        } else if (line[i] == '#' && !in_string) {
            return line.substr(0, i);
        }
    }
    return line;
}

template <class T>
struct Codec;

template <>
struct Codec<std::size_t> {
    static std::size_t parse(const std::string& raw) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc() || ptr != raw.data() + raw.size() || raw.empty())
            throw std::invalid_argument("expected a non-negative integer, got '" + raw + "'");
        return v;
    }
    static std::string format(std::size_t v) { return std::to_string(v); }
    static json to_json(std::size_t v) { return v; }
    static std::size_t from_json(const json& j) {
        if (!j.is_number_unsigned()) throw std::invalid_argument("expected a non-negative integer");
        return j.get<std::size_t>();
    }
};

template <>
struct Codec<double> {
    static double parse(const std::string& raw) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc() || ptr != raw.data() + raw.size() || raw.empty())
            throw std::invalid_argument("expected a number, got '" + raw + "'");
        if (!std::isfinite(v)) throw std::invalid_argument("expected a finite number, got '" + raw + "'");
        return v;
    }
    static std::string format(double v) { return format_double(v); }
    static json to_json(double v) { return v; }
    static double from_json(const json& j) {
        if (!j.is_number()) throw std::invalid_argument("expected a number");
        return j.get<double>();
    }
};

template <>
struct Codec<bool> {
    static bool parse(const std::string& raw) {
        if (raw == "true") return true;
        if (raw == "false") return false;
        throw std::invalid_argument("expected true or false, got '" + raw + "'");
    }
    static std::string format(bool v) { return v ? "true" : "false"; }
    static json to_json(bool v) { return v; }
    static bool from_json(const json& j) {
        if (!j.is_boolean()) throw std::invalid_argument("expected a boolean");
        return j.get<bool>();
    }
};

template <>
struct Codec<std::string> {
    static std::string parse(const std::string& raw) {
        if (raw.empty() || raw.front() != '"') {
            if (raw.find_first_of(" \t\"[]") != std::string::npos)
                throw std::invalid_argument("strings with spaces or brackets must be quoted");
            return raw;
        }
        std::size_t pos = 0;
        auto s = read_quoted(raw, pos);
        if (pos != raw.size()) throw std::invalid_argument("unexpected text after string");
        return s;
    }
    static std::string format(const std::string& v) { return quote(v); }
    static json to_json(const std::string& v) { return v; }
    static std::string from_json(const json& j) {
        if (!j.is_string()) throw std::invalid_argument("expected a string");
        return j.get<std::string>();
    }
};

template <>
struct Codec<std::vector<std::string>> {
    static std::vector<std::string> parse(const std::string& raw) {
        if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
            throw std::invalid_argument("expected an array like [\"a\", \"b\"]");
        std::vector<std::string> out;
        const std::string body = raw.substr(1, raw.size() - 2);
        std::size_t pos = 0;
        bool expect_item = true;
        while (true) {
            while (pos < body.size() && (body[pos] == ' ' || body[pos] == '\t')) ++pos;
            if (pos >= body.size()) break;
            if (expect_item) {
                if (body[pos] != '"') throw std::invalid_argument("array items must be quoted strings");
                out.push_back(read_quoted(body, pos));
                expect_item = false;
            } else {
                if (body[pos] != ',') throw std::invalid_argument("expected ',' between array items");
                ++pos;
                expect_item = true;
            }
        }
        return out;
    }
    static std::string format(const std::vector<std::string>& v) {
        std::string out = "[";
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + quote(v[i]);
        return out + "]";
    }
    static json to_json(const std::vector<std::string>& v) { return v; }
    static std::vector<std::string> from_json(const json& j) {
        if (!j.is_array()) throw std::invalid_argument("expected an array of strings");
        std::vector<std::string> out;
        for (const auto& item : j) out.push_back(Codec<std::string>::from_json(item));
        return out;
    }
};

template <>
struct Codec<std::optional<std::size_t>> {
    static std::optional<std::size_t> parse(const std::string& raw) {
        const auto v = Codec<std::size_t>::parse(raw);
        if (v == 0) throw std::invalid_argument("limit must be positive");
        return v;
    }
    static std::string format(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : ""; }
    static json to_json(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }
    static std::optional<std::size_t> from_json(const json& j) {
        if (j.is_null()) return std::nullopt;
        return Codec<std::size_t>::from_json(j);
    }
};

template <class E, E (*Parse)(const std::string&)>
struct EnumCodec {
    static E parse(const std::string& raw) { return Parse(Codec<std::string>::parse(raw)); }
    static std::string format(E v) { return quote(to_string(v)); }
    static json to_json(E v) { return to_string(v); }
    static E from_json(const json& j) { return Parse(Codec<std::string>::from_json(j)); }
};

template <>
struct Codec<HeadKind> : EnumCodec<HeadKind, parse_head> {};
template <>
struct Codec<ProviderKind> : EnumCodec<ProviderKind, parse_provider> {};
template <>
struct Codec<OptimizerKind> : EnumCodec<OptimizerKind, parse_optimizer> {};
template <>
struct Codec<SourceKind> : EnumCodec<SourceKind, parse_source> {};

struct Field {
    std::string section;
    std::string name;
    std::function<void(RunConfig&, const std::string&)> parse;
    std::function<std::string(const RunConfig&)> format;  // empty = omitted
    std::function<json(const RunConfig&)> to_json;
    std::function<void(RunConfig&, const json&)> from_json;

    std::string key() const { return section + "." + name; }
};

template <class Access>
Field field(std::string section, std::string name, Access access) {
    using T = std::remove_cvref_t<decltype(access(std::declval<RunConfig&>()))>;
    Field f;
    f.section = std::move(section);
    f.name = std::move(name);
    f.parse = [access](RunConfig& c, const std::string& raw) { access(c) = Codec<T>::parse(raw); };
    f.format = [access](const RunConfig& c) { return Codec<T>::format(access(c)); };
    f.to_json = [access](const RunConfig& c) { return Codec<T>::to_json(access(c)); };
    f.from_json = [access](RunConfig& c, const json& j) { access(c) = Codec<T>::from_json(j); };
    return f;
}

#define TC_FIELD(section, name, member) field(section, name, [](auto& c) -> auto& { return c.member; })

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        TC_FIELD("data", "source", data.source),
        TC_FIELD("data", "path", data.path),
        TC_FIELD("data", "labels", data.labels_path),
        TC_FIELD("data", "limit", data.limit),
        TC_FIELD("data", "preprocess", data.preprocess),

        TC_FIELD("preprocess", "lowercase", preprocess.lowercase),
        TC_FIELD("preprocess", "strip_punctuation", preprocess.strip_punctuation),
        TC_FIELD("preprocess", "keywords", preprocess.relevance_keywords),
        TC_FIELD("preprocess", "min_tokens", preprocess.min_tokens),

        TC_FIELD("blobs", "points", blobs.points),
        TC_FIELD("blobs", "dim", blobs.dim),
        TC_FIELD("blobs", "count", blobs.blobs),
        TC_FIELD("blobs", "sigma", blobs.sigma),
        TC_FIELD("blobs", "min_separation", blobs.min_separation),
        TC_FIELD("blobs", "seed", blobs.seed),

        TC_FIELD("train", "epochs", train.epochs),
        TC_FIELD("train", "batch_size", train.batch_size),
        TC_FIELD("train", "tau", train.tau),
        TC_FIELD("train", "lr", train.lr),
        TC_FIELD("train", "lr_scale", train.lr_scale),
        TC_FIELD("train", "alpha", train.alpha),
        TC_FIELD("train", "head", train.head),
        TC_FIELD("train", "k", train.k),
        TC_FIELD("train", "kmeans_max_iter", train.kmeans_max_iter),
        TC_FIELD("train", "restarts", train.restarts),
        TC_FIELD("train", "seed", train.seed),
        TC_FIELD("train", "optimizer", train.optimizer),
        TC_FIELD("train", "provider", train.provider),
        TC_FIELD("train", "hash_seed", train.hash_seed),
        TC_FIELD("train", "max_len", train.max_len),

        TC_FIELD("som", "rows", train.som.rows),
        TC_FIELD("som", "cols", train.som.cols),
        TC_FIELD("som", "iterations", train.som.iterations),
        TC_FIELD("som", "alpha0", train.som.alpha0),
        TC_FIELD("som", "delta0", train.som.delta0),

        TC_FIELD("encoder", "model_dim", train.encoder.model_dim),
        TC_FIELD("encoder", "heads", train.encoder.heads),
        TC_FIELD("encoder", "head_dim", train.encoder.head_dim),
        TC_FIELD("encoder", "ff_dim", train.encoder.ff_dim),
        TC_FIELD("encoder", "out_dim", train.encoder.out_dim),

        TC_FIELD("augment", "delete_prob", train.augment.word_delete_prob),
        TC_FIELD("augment", "swap_prob", train.augment.word_swap_prob),
        TC_FIELD("augment", "mask_prob", train.augment.span_mask_prob),
    };
    return table;
}

#undef TC_FIELD

const Field& find_field(const std::string& key) {
    for (const auto& f : fields())
        if (f.key() == key) return f;
    throw ConfigError("unknown config key '" + key + "'");
}

void set_value(RunConfig& config, const std::string& key, const std::string& raw) {
    const auto& f = find_field(key);
    try {
        f.parse(config, raw);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError("bad value for '" + key + "': " + ex.what());
    }
}

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.key());
    return out;
}

RunConfig parse_config(const std::string& text) {
    RunConfig config;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw_line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw_line));
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string name = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (name.empty()) throw ConfigError(where + "missing key");
        if (value.empty()) throw ConfigError(where + "missing value for '" + name + "'");
        const std::string key = section.empty() ? name : section + "." + name;
        if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            set_value(config, key, value);
        } catch (const ConfigError& ex) {
            throw ConfigError(where + ex.what());
        }
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& ex) {
        throw ConfigError(path.string() + ": " + ex.what());
    }
}

std::string to_toml(const RunConfig& config) {
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        const std::string value = f.format(config);
        if (f.section != section) {
            section = f.section;
            out += (out.empty() ? "[" : "\n[") + section + "]\n";
        }
        if (value.empty()) continue;
        out += f.name + " = " + value + "\n";
    }
    return out;
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (value.empty()) throw ConfigError("override '" + assignment + "' has no value");
    set_value(config, key, value);
}

json config_to_json(const RunConfig& config) {
    json j = json::object();
    for (const auto& f : fields()) j[f.section][f.name] = f.to_json(config);
    return j;
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config JSON must be an object");
    RunConfig config;
    for (const auto& [section, body] : j.items()) {
        if (!body.is_object()) throw ConfigError("config section '" + section + "' must be an object");
        for (const auto& [name, value] : body.items()) {
            const auto& f = find_field(section + "." + name);
            try {
                f.from_json(config, value);
            } catch (const std::exception& ex) {
                throw ConfigError("bad value for '" + f.key() + "': " + ex.what());
            }
        }
    }
    return config;
}

std::vector<int> load_label_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open label file " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(trim(line));
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    std::vector<int> labels;
    labels.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        int v = 0;
        const auto& s = lines[i];
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
            throw std::runtime_error(path.string() + ": line " + std::to_string(i + 1) +
                                     ": expected a non-negative integer label");
        }
        labels.push_back(v);
    }
    return labels;
}

void save_label_file(const std::vector<int>& labels, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (int v : labels) out << v << '\n';
}

Corpus load_text_corpus(const RunConfig& config) {
    const auto& d = config.data;
    if (d.path.empty()) throw ConfigError("data.path is required for source '" + to_string(d.source) + "'");
    Corpus corpus;
    switch (d.source) {
        case SourceKind::agnews: corpus = load_agnews(d.path, d.limit); break;
        case SourceKind::stackoverflow:
            corpus = d.labels_path.empty() ? load_stackoverflow(d.path, d.limit)
                                           : load_stackoverflow(d.path, d.labels_path, d.limit);
            break;
        case SourceKind::corpus:
            corpus = load_corpus(d.path);
            if (d.limit && corpus.documents.size() > *d.limit) corpus.documents.resize(*d.limit);
            break;
        case SourceKind::blobs:
        case SourceKind::embeddings:
            throw ConfigError("data source '" + to_string(d.source) + "' carries no text");
    }
    if (d.preprocess) corpus = dedup(preprocess_corpus(corpus, config.preprocess));
    return corpus;
}

TrainData load_data(const RunConfig& config) {
    const auto& d = config.data;
    const bool fixed = config.train.provider == ProviderKind::fixed;
    switch (d.source) {
        case SourceKind::blobs: {
            if (!fixed) throw ConfigError("source 'blobs' needs provider 'fixed'");
            return make_blobs(config.blobs);
        }
        case SourceKind::embeddings: {
            if (!fixed) throw ConfigError("source 'embeddings' needs provider 'fixed'");
            if (d.path.empty()) throw ConfigError("data.path is required for source 'embeddings'");
            auto set = load_embeddings(d.path);
            std::vector<int> labels;
            if (!d.labels_path.empty()) labels = load_label_file(d.labels_path);
            if (d.limit && set.n > *d.limit) {
                set.n = *d.limit;
                set.data.resize(set.n * set.d);
                set.ids.resize(set.n);
                if (labels.size() > set.n) labels.resize(set.n);
            }
            auto data = TrainData::from_embeddings(set, std::move(labels));
            data.name = std::filesystem::path(d.path).stem().string();
            return data;
        }
        default: {
            if (fixed) {
                throw ConfigError("source '" + to_string(d.source) +
                                  "' is text; set train.provider to hashed or encoder");
            }
            auto data = TrainData::from_corpus(load_text_corpus(config));
            data.name = to_string(d.source);
            return data;
        }
    }
}

}  // namespace textclust
