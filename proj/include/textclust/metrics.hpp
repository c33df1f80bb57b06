#pragma once

#include <cstddef>
#include <vector>

#include "textclust/matrix.hpp"

namespace textclust {

using CountMatrix = std::vector<std::vector<long long>>;

// Rows indexed by predicted label, columns by true label; sized max(label)+1.
CountMatrix confusion_matrix(const std::vector<int>& pred, const std::vector<int>& truth);

// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
// Returns assignment[row] = column.
std::vector<std::size_t> hungarian_min_cost(const Matrix& cost);

struct AccuracyResult {
    double acc = 0.0;
    std::vector<int> mapping;  // mapping[pred] = true label, or -1 when unmatched
};

// Best one-to-one mapping of predicted to true labels.
AccuracyResult clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

// 2·I(Y;C) / (H(Y) + H(C)), natural logs; 1.0 when both labelings are constant.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

struct EvalReport {
    double acc = 0.0;
    double nmi = 0.0;
    std::size_t n = 0;
    CountMatrix confusion;
    std::vector<int> mapping;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

EvalReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth);

}  // namespace textclust
