#include "textclust/embed.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "textclust/rng.hpp"

namespace textclust {

namespace {

constexpr std::uint8_t kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::size_t kHeaderSize = 12;

std::uint32_t read_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint64_t read_u64(const std::uint8_t* p) {
    return static_cast<std::uint64_t>(read_u32(p)) | static_cast<std::uint64_t>(read_u32(p + 4)) << 32;
}

void write_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void write_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t token_hash(const std::string& token, std::uint64_t seed) { return splitmix64(fnv1a(token) ^ seed); }

void check_finite(const Matrix& m, const char* what) {
    if (!m.all_finite()) throw std::invalid_argument(std::string(what) + " contains non-finite values");
}

}  // namespace

Matrix EmbeddingSet::to_matrix() const {
    Matrix m(n, d);
    std::transform(data.begin(), data.end(), m.data().begin(), [](float f) { return static_cast<double>(f); });
    return m;
}

EmbeddingSet EmbeddingSet::from_matrix(const Matrix& m, std::vector<std::uint64_t> ids) {
    EmbeddingSet set;
    set.n = m.rows();
    set.d = m.cols();
    set.data.resize(m.size());
    std::transform(m.data().begin(), m.data().end(), set.data.begin(), [](double v) { return static_cast<float>(v); });
    if (ids.empty()) {
        ids.resize(set.n);
        for (std::size_t i = 0; i < set.n; ++i) ids[i] = i;
    }
    set.ids = std::move(ids);
    set.validate();
    return set;
}

void EmbeddingSet::validate() const {
    if (n == 0 || d == 0) throw std::invalid_argument("embedding set must have n >= 1 and d >= 1");
    if (data.size() != n * d) throw std::invalid_argument("embedding data size disagrees with n*d");
    if (ids.size() != n) throw std::invalid_argument("embedding ids size disagrees with n");
    for (std::size_t i = 0; i < n; ++i)
        for (float v : row(i))
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite embedding value in row " + std::to_string(i));
}

EmbeddingSet parse_embeddings(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
        throw std::runtime_error("not an embedding file");
    }
    if (bytes.size() < kHeaderSize) throw std::runtime_error("truncated payload");
    EmbeddingSet set;
    set.n = read_u32(bytes.data() + 4);
    set.d = read_u32(bytes.data() + 8);
    if (set.n == 0 || set.d == 0) throw std::runtime_error("embedding file declares an empty matrix");

    const std::size_t payload = set.n * set.d * 4;
    const std::size_t available = bytes.size() - kHeaderSize;
    if (available < payload) throw std::runtime_error("truncated payload");

    set.data.resize(set.n * set.d);
    const std::uint8_t* p = bytes.data() + kHeaderSize;
    for (std::size_t i = 0; i < set.data.size(); ++i, p += 4) {
        const float v = std::bit_cast<float>(read_u32(p));
        if (!std::isfinite(v)) throw std::runtime_error("non-finite value in row " + std::to_string(i / set.d));
        set.data[i] = v;
    }

    const std::size_t trailing = available - payload;
    if (trailing == 0) {
        set.ids.resize(set.n);
        for (std::size_t i = 0; i < set.n; ++i) set.ids[i] = i;
    } else if (trailing == 1 + 8 * set.n && *p == 0x01) {
        ++p;
        set.ids.resize(set.n);
        for (std::size_t i = 0; i < set.n; ++i, p += 8) set.ids[i] = read_u64(p);
    } else if (*p == 0x01 && trailing < 1 + 8 * set.n) {
        throw std::runtime_error("truncated id block");
    } else {
        throw std::runtime_error("unexpected trailing data after payload");
    }
    return set;
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_embeddings(bytes);
}

std::vector<std::uint8_t> serialize_embeddings(const EmbeddingSet& set, bool write_ids) {
    set.validate();
    if (set.n > UINT32_MAX || set.d > UINT32_MAX) throw std::invalid_argument("embedding set too large for EMB1");
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    out.reserve(kHeaderSize + set.data.size() * 4 + (write_ids ? 1 + 8 * set.n : 0));
    write_u32(out, static_cast<std::uint32_t>(set.n));
    write_u32(out, static_cast<std::uint32_t>(set.d));
    for (float v : set.data) write_u32(out, std::bit_cast<std::uint32_t>(v));
    if (write_ids) {
        out.push_back(0x01);
        for (auto id : set.ids) write_u64(out, id);
    }
    return out;
}

void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path, bool write_ids) {
    const auto bytes = serialize_embeddings(set, write_ids);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::size_t hash_bucket(const std::string& token, std::size_t d, std::uint64_t seed) {
    return static_cast<std::size_t>(token_hash(token, seed) % d);
}

double hash_sign(const std::string& token, std::uint64_t seed) {
    return (token_hash(token, seed) >> 63) ? -1.0 : 1.0;
}

Vector hashed_bow_counts(const std::string& text, std::size_t d, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("hashed_bow: d must be at least 2");
    Vector v(d, 0.0);
    for (const auto& tok : tokenize(text)) {
        const auto h = token_hash(tok, seed);
        v[h % d] += (h >> 63) ? -1.0 : 1.0;
    }
    return v;
}

Vector hashed_bow(const std::string& text, std::size_t d, std::uint64_t seed) {
    auto v = hashed_bow_counts(text, d, seed);
    const double n = norm2(v);
    if (n > 0.0)
        for (double& x : v) x /= n;
    return v;
}

EmbeddingSet embed_corpus_hashed(const Corpus& corpus, std::size_t d, std::uint64_t seed) {
    if (corpus.documents.empty()) throw std::invalid_argument("cannot embed an empty corpus");
    Matrix m(corpus.size(), d);
    std::vector<std::uint64_t> ids;
    ids.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto v = hashed_bow(corpus.documents[i].text, d, seed);
        std::copy(v.begin(), v.end(), m.row(i).begin());
        ids.push_back(corpus.documents[i].id);
    }
    return EmbeddingSet::from_matrix(m, std::move(ids));
}

Matrix self_attention(const Matrix& q, const Matrix& k, const Matrix& v, Matrix* attention) {
    if (q.cols() == 0) throw std::invalid_argument("self_attention: d_k must be at least 1");
    if (k.cols() != q.cols() || k.rows() != v.rows() || q.rows() != k.rows()) {
        throw std::invalid_argument("self_attention: shape mismatch between Q, K and V");
    }
    check_finite(q, "self_attention: Q");
    check_finite(k, "self_attention: K");
    check_finite(v, "self_attention: V");

    Matrix scores = matmul_nt(q, k);
    const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        auto r = scores.row(i);
        double mx = -INFINITY;
        for (double& s : r) {
            s *= scale;
            mx = std::max(mx, s);
        }
        double z = 0.0;
        for (double& s : r) {
            s = std::exp(s - mx);
            z += s;
        }
        for (double& s : r) s /= z;
    }
    Matrix out = matmul(scores, v);
    if (attention) *attention = std::move(scores);
    return out;
}

Vector positional_encoding(std::size_t position, std::size_t d) {
    Vector pe(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < d; ++i) {
        const double freq = std::pow(10000.0, -static_cast<double>(i - i % 2) / static_cast<double>(d));
        const double angle = static_cast<double>(position) * freq;
        pe[i] = scale * (i % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
    return pe;
}

Matrix token_matrix(const std::string& text, std::size_t d, std::uint64_t seed, std::size_t max_len) {
    auto tokens = tokenize(text);
    if (tokens.empty()) throw std::invalid_argument("token_matrix: text has no tokens");
    if (tokens.size() > max_len) tokens.resize(max_len);
    Matrix x(tokens.size(), d);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto tv = hashed_bow(tokens[i], d, seed);
        const auto pe = positional_encoding(i, d);
        for (std::size_t j = 0; j < d; ++j) x(i, j) = tv[j] + pe[j];
    }
    return x;
}

// ---------------------------------------------------------------------------
// Encoder

EncoderParams EncoderParams::zeros(const EncoderShape& s) {
    EncoderParams p;
    for (std::size_t h = 0; h < s.heads; ++h) {
        p.wq.emplace_back(s.model_dim, s.head_dim);
        p.wk.emplace_back(s.model_dim, s.head_dim);
        p.wv.emplace_back(s.model_dim, s.head_dim);
    }
    p.wc = Matrix(s.heads * s.head_dim, s.model_dim);
    p.w1 = Matrix(s.model_dim, s.ff_dim);
    p.b1 = Matrix(1, s.ff_dim);
    p.w2 = Matrix(s.ff_dim, s.model_dim);
    p.b2 = Matrix(1, s.model_dim);
    p.g = Matrix(s.model_dim, s.out_dim);
    return p;
}

EncoderParams EncoderParams::random(const EncoderShape& s, std::uint64_t seed) {
    if (s.model_dim == 0 || s.heads == 0 || s.head_dim == 0 || s.ff_dim == 0 || s.out_dim == 0) {
        throw std::invalid_argument("encoder dimensions must be positive");
    }
    auto p = zeros(s);
    Rng rng(seed);
    // Glorot-style normal init; biases stay zero.
    p.for_each([&](const std::string& name, Matrix& m) {
        if (name == "b1" || name == "b2") return;
        const double stddev = std::sqrt(2.0 / static_cast<double>(m.rows() + m.cols()));
        for (double& x : m.data()) x = stddev * rng.normal();
    });
    return p;
}

EncoderShape EncoderParams::shape() const {
    EncoderShape s;
    s.heads = wq.size();
    s.model_dim = wc.cols();
    s.head_dim = wq.empty() ? 0 : wq.front().cols();
    s.ff_dim = w1.cols();
    s.out_dim = g.cols();
    return s;
}

namespace {

void check_encoder_shapes(const EncoderParams& p) {
    if (p.wq.empty()) throw std::invalid_argument("encoder params: no attention heads");
    if (p.wk.size() != p.wq.size()) throw std::invalid_argument("encoder params: wk head count differs from wq");
    if (p.wv.size() != p.wq.size()) throw std::invalid_argument("encoder params: wv head count differs from wq");
    const std::size_t d = p.wq.front().rows();
    const std::size_t dk = p.wq.front().cols();
    for (std::size_t h = 0; h < p.wq.size(); ++h) {
        const auto tag = "[" + std::to_string(h) + "]";
        require_shape(p.wq[h], d, dk, "encoder params: wq" + tag);
        require_shape(p.wk[h], d, dk, "encoder params: wk" + tag);
        require_shape(p.wv[h], d, dk, "encoder params: wv" + tag);
    }
    require_shape(p.wc, p.wq.size() * dk, d, "encoder params: wc");
    if (p.w1.rows() != d) throw std::invalid_argument("encoder params: w1 must have model_dim rows");
    const std::size_t ff = p.w1.cols();
    require_shape(p.b1, 1, ff, "encoder params: b1");
    require_shape(p.w2, ff, d, "encoder params: w2");
    require_shape(p.b2, 1, d, "encoder params: b2");
    if (p.g.rows() != d) throw std::invalid_argument("encoder params: g must have model_dim rows");
}

}  // namespace

void EncoderParams::validate() const {
    check_encoder_shapes(*this);
    for_each([](const std::string& name, const Matrix& m) {
        if (!m.all_finite()) throw std::invalid_argument("encoder params: " + name + " has non-finite entries");
    });
}

void EncoderParams::for_each(const std::function<void(const std::string&, Matrix&)>& fn) {
    for (std::size_t h = 0; h < wq.size(); ++h) {
        fn("wq[" + std::to_string(h) + "]", wq[h]);
        fn("wk[" + std::to_string(h) + "]", wk[h]);
        fn("wv[" + std::to_string(h) + "]", wv[h]);
    }
    fn("wc", wc);
    fn("w1", w1);
    fn("b1", b1);
    fn("w2", w2);
    fn("b2", b2);
    fn("g", g);
}

void EncoderParams::for_each(const std::function<void(const std::string&, const Matrix&)>& fn) const {
    const_cast<EncoderParams*>(this)->for_each([&](const std::string& name, Matrix& m) { fn(name, m); });
}

std::size_t EncoderParams::parameter_count() const {
    std::size_t n = 0;
    for_each([&](const std::string&, const Matrix& m) { n += m.size(); });
    return n;
}

Matrix layer_norm(const Matrix& x, std::vector<double>* sigma) {
    Matrix y(x.rows(), x.cols());
    if (sigma) sigma->assign(x.rows(), 0.0);
    const double d = static_cast<double>(x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto r = x.row(i);
        double mean = 0.0;
        for (double v : r) mean += v;
        mean /= d;
        double var = 0.0;
        for (double v : r) var += (v - mean) * (v - mean);
        var /= d;
        const double s = std::sqrt(var + kLayerNormEps);
        for (std::size_t j = 0; j < x.cols(); ++j) y(i, j) = (r[j] - mean) / s;
        if (sigma) (*sigma)[i] = s;
    }
    return y;
}

Matrix layer_norm_backward(const Matrix& y, const std::vector<double>& sigma, const Matrix& grad_y) {
    Matrix gx(y.rows(), y.cols());
    const double d = static_cast<double>(y.cols());
    for (std::size_t i = 0; i < y.rows(); ++i) {
        auto yr = y.row(i);
        auto gr = grad_y.row(i);
        double mean_g = 0.0;
        double mean_gy = 0.0;
        for (std::size_t j = 0; j < y.cols(); ++j) {
            mean_g += gr[j];
            mean_gy += gr[j] * yr[j];
        }
        mean_g /= d;
        mean_gy /= d;
        for (std::size_t j = 0; j < y.cols(); ++j) gx(i, j) = (gr[j] - mean_g - yr[j] * mean_gy) / sigma[i];
    }
    return gx;
}

Vector encoder_forward(const EncoderParams& params, const Matrix& x, EncoderCache* cache) {
    check_encoder_shapes(params);
    const auto s = params.shape();
    if (x.cols() != s.model_dim) {
        throw std::invalid_argument("encoder_forward: token matrix has " + std::to_string(x.cols()) +
                                    " columns but wq expects " + std::to_string(params.wq.front().rows()));
    }
    if (x.rows() == 0) throw std::invalid_argument("encoder_forward: empty token matrix");
    if (!x.all_finite()) throw std::invalid_argument("encoder_forward: token matrix has non-finite entries");

    EncoderCache local;
    EncoderCache& c = cache ? *cache : local;
    c = EncoderCache{};
    c.x = x;

    const std::size_t m = x.rows();
    c.concat = Matrix(m, s.heads * s.head_dim);
    for (std::size_t h = 0; h < s.heads; ++h) {
        c.q.push_back(matmul(x, params.wq[h]));
        c.k.push_back(matmul(x, params.wk[h]));
        c.v.push_back(matmul(x, params.wv[h]));
        Matrix a;
        const Matrix head = self_attention(c.q[h], c.k[h], c.v[h], &a);
        c.attn.push_back(std::move(a));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < s.head_dim; ++j) c.concat(i, h * s.head_dim + j) = head(i, j);
    }

    Matrix r1 = matmul(c.concat, params.wc);
    add_inplace(r1, x);
    c.h1 = layer_norm(r1, &c.sigma1);

    c.pre_relu = matmul(c.h1, params.w1);
    for (std::size_t i = 0; i < m; ++i) axpy(1.0, params.b1.row(0), c.pre_relu.row(i));
    c.hidden = c.pre_relu;
    for (double& v : c.hidden.data()) v = std::max(0.0, v);

    Matrix r2 = matmul(c.hidden, params.w2);
    for (std::size_t i = 0; i < m; ++i) axpy(1.0, params.b2.row(0), r2.row(i));
    add_inplace(r2, c.h1);
    c.h2 = layer_norm(r2, &c.sigma2);

    c.pooled.assign(s.model_dim, 0.0);
    for (std::size_t i = 0; i < m; ++i) axpy(1.0 / static_cast<double>(m), c.h2.row(i), c.pooled);

    Vector out(s.out_dim, 0.0);
    for (std::size_t i = 0; i < s.model_dim; ++i) axpy(c.pooled[i], params.g.row(i), out);
    return out;
}

void encoder_backward(const EncoderParams& params, const EncoderCache& c, std::span<const double> grad_out,
                      EncoderParams& grads) {
    const auto s = params.shape();
    const std::size_t m = c.x.rows();
    if (grad_out.size() != s.out_dim) throw std::invalid_argument("encoder_backward: gradient has wrong size");

    // out = pooled · g
    Vector grad_pooled(s.model_dim, 0.0);
    for (std::size_t i = 0; i < s.model_dim; ++i) {
        axpy(c.pooled[i], grad_out, grads.g.row(i));
        grad_pooled[i] = dot(params.g.row(i), grad_out);
    }

    Matrix grad_h2(m, s.model_dim);
    for (std::size_t i = 0; i < m; ++i) axpy(1.0 / static_cast<double>(m), grad_pooled, grad_h2.row(i));
    const Matrix grad_r2 = layer_norm_backward(c.h2, c.sigma2, grad_h2);

    // r2 = h1 + relu(h1 W1 + b1) W2 + b2
    add_inplace(grads.w2, matmul_tn(c.hidden, grad_r2));
    for (std::size_t i = 0; i < m; ++i) axpy(1.0, grad_r2.row(i), grads.b2.row(0));
    Matrix grad_pre = matmul_nt(grad_r2, params.w2);
    for (std::size_t i = 0; i < grad_pre.size(); ++i)
        if (c.pre_relu.data()[i] <= 0.0) grad_pre.data()[i] = 0.0;
    add_inplace(grads.w1, matmul_tn(c.h1, grad_pre));
    for (std::size_t i = 0; i < m; ++i) axpy(1.0, grad_pre.row(i), grads.b1.row(0));
    Matrix grad_h1 = matmul_nt(grad_pre, params.w1);
    add_inplace(grad_h1, grad_r2);

    // h1 = LayerNorm(x + concat · Wc)
    const Matrix grad_r1 = layer_norm_backward(c.h1, c.sigma1, grad_h1);
    add_inplace(grads.wc, matmul_tn(c.concat, grad_r1));
    const Matrix grad_concat = matmul_nt(grad_r1, params.wc);

    const double scale = 1.0 / std::sqrt(static_cast<double>(s.head_dim));
    for (std::size_t h = 0; h < s.heads; ++h) {
        Matrix grad_head(m, s.head_dim);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < s.head_dim; ++j) grad_head(i, j) = grad_concat(i, h * s.head_dim + j);

        const Matrix& a = c.attn[h];
        const Matrix grad_a = matmul_nt(grad_head, c.v[h]);
        const Matrix grad_v = matmul_tn(a, grad_head);

        // softmax rows
        Matrix grad_scores(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            const double inner = dot(a.row(i), grad_a.row(i));
            for (std::size_t j = 0; j < m; ++j) grad_scores(i, j) = a(i, j) * (grad_a(i, j) - inner) * scale;
        }
        const Matrix grad_q = matmul(grad_scores, c.k[h]);
        const Matrix grad_k = matmul_tn(grad_scores, c.q[h]);

        add_inplace(grads.wq[h], matmul_tn(c.x, grad_q));
        add_inplace(grads.wk[h], matmul_tn(c.x, grad_k));
        add_inplace(grads.wv[h], matmul_tn(c.x, grad_v));
    }
}

}  // namespace textclust
