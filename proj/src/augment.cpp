#include "textclust/augment.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "textclust/corpus.hpp"
#include "textclust/rng.hpp"

namespace textclust {

namespace {

void check_prob(double p, const char* name) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1)");
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

}  // namespace

void AugmentPolicy::validate() const {
    check_prob(word_delete_prob, "word_delete_prob");
    check_prob(word_swap_prob, "word_swap_prob");
    check_prob(span_mask_prob, "span_mask_prob");
}

std::string augment_view(const std::string& text, const AugmentPolicy& policy, std::uint64_t instance_index,
                         unsigned view) {
    policy.validate();
    auto tokens = tokenize(text);
    if (tokens.empty()) throw std::invalid_argument("cannot augment empty text");
    if (policy.word_delete_prob == 0.0 && policy.word_swap_prob == 0.0 && policy.span_mask_prob == 0.0) return text;

    Rng rng(splitmix64(policy.seed ^ instance_index) + view);

    if (policy.word_delete_prob > 0.0) {
        std::vector<std::string> kept;
        kept.reserve(tokens.size());
        for (const auto& t : tokens)
            if (rng.uniform() >= policy.word_delete_prob) kept.push_back(t);
        if (kept.empty()) kept.push_back(tokens[rng.below(tokens.size())]);
        tokens = std::move(kept);
    }

    if (policy.word_swap_prob > 0.0) {
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
            if (rng.uniform() < policy.word_swap_prob) {
                std::swap(tokens[i], tokens[i + 1]);
                ++i;
            }
        }
    }

    if (policy.span_mask_prob > 0.0 && rng.uniform() < policy.span_mask_prob) {
        // span length in [1, max(1, n/4)]
        const std::size_t max_len = std::max<std::size_t>(1, tokens.size() / 4);
        const std::size_t len = 1 + rng.below(max_len);
        const std::size_t start = rng.below(tokens.size() - len + 1);
        for (std::size_t i = start; i < start + len; ++i) tokens[i] = kMaskToken;
    }

    return join(tokens);
}

std::pair<std::string, std::string> augment_pair(const std::string& text, const AugmentPolicy& policy,
                                                 std::uint64_t instance_index) {
    return {augment_view(text, policy, instance_index, 0), augment_view(text, policy, instance_index, 1)};
}

}  // namespace textclust
