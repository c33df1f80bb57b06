#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "textclust/corpus.hpp"
#include "textclust/matrix.hpp"

namespace textclust {

// n×d text representations with the ids of the documents they came from.
// Stored as f32; a save/load cycle through EMB1 is bit-exact.
struct EmbeddingSet {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<float> data;  // row-major
    std::vector<std::uint64_t> ids;

    std::span<const float> row(std::size_t i) const { return {data.data() + i * d, d}; }
    Matrix to_matrix() const;
    static EmbeddingSet from_matrix(const Matrix& m, std::vector<std::uint64_t> ids = {});
    void validate() const;

    friend bool operator==(const EmbeddingSet&, const EmbeddingSet&) = default;
};

// EMB1: "EMB1", u32 LE n, u32 LE d, n·d f32 LE row-major, then optionally
// u8 0x01 followed by n u64 LE ids. Ids default to 0..n-1 when absent.
EmbeddingSet load_embeddings(const std::filesystem::path& path);
EmbeddingSet parse_embeddings(std::span<const std::uint8_t> bytes);
void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path, bool write_ids = true);
std::vector<std::uint8_t> serialize_embeddings(const EmbeddingSet& set, bool write_ids = true);

// Signed feature hashing of whitespace tokens.
std::size_t hash_bucket(const std::string& token, std::size_t d, std::uint64_t seed);
double hash_sign(const std::string& token, std::uint64_t seed);
Vector hashed_bow_counts(const std::string& text, std::size_t d, std::uint64_t seed);
// L2-normalized counts, or exactly zero when every bucket cancels.
Vector hashed_bow(const std::string& text, std::size_t d, std::uint64_t seed);
EmbeddingSet embed_corpus_hashed(const Corpus& corpus, std::size_t d, std::uint64_t seed);

// softmax(Q Kᵀ / sqrt(d_k)) V. The attention matrix is written to `attention` when given.
Matrix self_attention(const Matrix& q, const Matrix& k, const Matrix& v, Matrix* attention = nullptr);

// Sinusoidal position code, scaled by 1/sqrt(d).
Vector positional_encoding(std::size_t position, std::size_t d);

// One row per token (at most max_len): hashed token vector plus position code.
Matrix token_matrix(const std::string& text, std::size_t d, std::uint64_t seed, std::size_t max_len = 32);

struct EncoderShape {
    std::size_t model_dim = 16;
    std::size_t heads = 2;
    std::size_t head_dim = 8;
    std::size_t ff_dim = 32;
    std::size_t out_dim = 16;

    friend bool operator==(const EncoderShape&, const EncoderShape&) = default;
};

inline constexpr double kLayerNormEps = 1e-5;

// One self-attention + feed-forward block followed by mean pooling and a
// linear projection head g.
struct EncoderParams {
    std::vector<Matrix> wq, wk, wv;  // per head, d×head_dim
    Matrix wc;                       // (heads·head_dim)×d
    Matrix w1, b1;                   // d×ff, 1×ff
    Matrix w2, b2;                   // ff×d, 1×d
    Matrix g;                        // d×out

    static EncoderParams random(const EncoderShape& shape, std::uint64_t seed);
    static EncoderParams zeros(const EncoderShape& shape);
    EncoderShape shape() const;
    // Throws naming the first parameter whose shape disagrees with the rest.
    void validate() const;

    void for_each(const std::function<void(const std::string&, Matrix&)>& fn);
    void for_each(const std::function<void(const std::string&, const Matrix&)>& fn) const;
    std::size_t parameter_count() const;

    friend bool operator==(const EncoderParams&, const EncoderParams&) = default;
};

// Intermediates kept by the forward pass for backpropagation.
struct EncoderCache {
    Matrix x;
    std::vector<Matrix> q, k, v, attn;
    Matrix concat;
    Matrix h1;               // LayerNorm(x + MultiHead)
    std::vector<double> sigma1;
    Matrix pre_relu;         // h1 W1 + b1
    Matrix hidden;           // relu(pre_relu)
    Matrix h2;               // LayerNorm(h1 + FF)
    std::vector<double> sigma2;
    Vector pooled;
};

// Row-wise layer normalization without affine terms; per-row sigma written to `sigma`.
Matrix layer_norm(const Matrix& x, std::vector<double>* sigma = nullptr);
// Gradient through layer_norm given its output y and per-row sigma.
Matrix layer_norm_backward(const Matrix& y, const std::vector<double>& sigma, const Matrix& grad_y);

Vector encoder_forward(const EncoderParams& params, const Matrix& x, EncoderCache* cache = nullptr);
// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(output).
void encoder_backward(const EncoderParams& params, const EncoderCache& cache, std::span<const double> grad_out,
                      EncoderParams& grads);

}  // namespace textclust
