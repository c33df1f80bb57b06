#pragma once

#include <span>

#include "textclust/matrix.hpp"

namespace textclust {

inline constexpr double kProbFloor = 1e-12;

double cosine_sim(std::span<const double> a, std::span<const double> b);

struct ContrastiveResult {
    double loss = 0.0;
    Matrix grad_z1;
    Matrix grad_z2;
};

// Instance-level contrastive loss over the 2n views {Z1 rows, Z2 rows}. For
// view i the positive is the other view of the same instance and the
// denominator runs over all 2n-1 other views. Returns the mean over the 2n
// per-view losses with analytic gradients.
ContrastiveResult contrastive_loss(const Matrix& z1, const Matrix& z2, double tau);

// Student-t kernel memberships, rows normalized.
struct SoftAssignment {
    Matrix q;
    double alpha = 1.0;
};

SoftAssignment soft_assign(const Matrix& embeddings, const Matrix& centroids, double alpha = 1.0);

// Sharpened target: p_jk ∝ q_jk² / f_k with f_k the column sums of Q.
struct TargetDistribution {
    Matrix p;
    Vector f;
};

TargetDistribution target_distribution(const SoftAssignment& q);

// Batch-mean KL(p_j || q_j); 0·log 0 = 0 and q floored at kProbFloor.
double kl_divergence(const Matrix& p, const Matrix& q);

struct KlResult {
    double loss = 0.0;
    Matrix grad_embeddings;
    Matrix grad_centroids;
};

// KL clustering loss with P held constant. Gradients are taken through the
// Student-t assignment that produced `q` from `embeddings` and `centroids`.
KlResult kl_cluster_loss(const TargetDistribution& p, const SoftAssignment& q, const Matrix& embeddings,
                         const Matrix& centroids);

struct LossBreakdown {
    double contrastive = 0.0;
    double clustering = 0.0;
    double total = 0.0;
    double tau = 1.0;

    friend bool operator==(const LossBreakdown&, const LossBreakdown&) = default;
};

LossBreakdown total_loss(double contrastive, double clustering, double tau = 1.0);

void check_tau(double tau);

double entropy(std::span<const double> p);

}  // namespace textclust
