#pragma once

#include <cstdint>
#include <string>
#include <utility>

namespace textclust {

inline constexpr const char* kMaskToken = "[MASK]";

// Text-level augmentations applied in order: random word deletion, adjacent
// word swap, then masking of one contiguous span.
struct AugmentPolicy {
    double word_delete_prob = 0.1;
    double word_swap_prob = 0.1;
    double span_mask_prob = 0.1;
    std::uint64_t seed = 0;

    static AugmentPolicy identity(std::uint64_t seed = 0) { return {0.0, 0.0, 0.0, seed}; }
    void validate() const;

    friend bool operator==(const AugmentPolicy&, const AugmentPolicy&) = default;
};

// Two independently sampled views of `text`. Deterministic in
// (policy.seed, instance_index); every view keeps at least one token.
std::pair<std::string, std::string> augment_pair(const std::string& text, const AugmentPolicy& policy,
                                                 std::uint64_t instance_index);

// One view drawn from the stream identified by (seed, instance_index, view).
std::string augment_view(const std::string& text, const AugmentPolicy& policy, std::uint64_t instance_index,
                         unsigned view);

}  // namespace textclust
