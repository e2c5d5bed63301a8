#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crosstab/numerics.hpp"

namespace crosstab {

// Labeled point set (n >= 3, finite coordinates, distinct labels).
class Configuration {
 public:
  static Configuration build(std::vector<std::string> labels, Matrix coords);

  Index size() const { return coords_.rows(); }
  Index dims() const { return coords_.cols(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Matrix& coords() const { return coords_; }

 private:
  Configuration() = default;
  std::vector<std::string> labels_;
  Matrix coords_;
};

struct ProcrustesResult {
  double m2 = 0.0;       // standardized residual in [0, 1]; 0 = same shape
  Matrix rotation;       // k x k orthogonal, reflections permitted
  double scale = 1.0;    // applied to b when mapping onto a
  Vector translation;    // row vector t of the map x -> scale * x * R + t
};

// Symmetric Procrustes: both configurations are centered and scaled to unit
// sum of squares before the optimal rotation is fitted. Configurations of
// unequal dimensionality are aligned by zero-padding the narrower one.
ProcrustesResult procrustes_fit(const Configuration& a, const Configuration& b);

// Permutation test: shuffles the rows of b, refits, counts permuted m2 <=
// observed. p = (count + 1) / (permutations + 1); deterministic per seed.
double procrustes_test(const Configuration& a, const Configuration& b,
                       std::int64_t permutations, std::uint64_t seed);

struct AgreementResult {
  double ar = 0.0;
  double adjusted_ar = 0.0;
  std::vector<double> per_k;           // AR_k for k = 1..max_k
  std::vector<double> adjusted_per_k;  // (AR_k - k/(n-1)) / (1 - k/(n-1))
};

// Mean overlap of k-nearest-neighbor sets across the two configurations,
// k = 1..max_k, Euclidean distances, ties broken by ascending label.
AgreementResult agreement_rates(const Configuration& a, const Configuration& b,
                                Index max_k);

struct Merge {
  Index a = 0;  // cluster ids: leaves 0..n-1, step s creates id n+s
  Index b = 0;
  double height = 0.0;
};

struct Dendrogram {
  std::vector<std::string> labels;  // leaf labels; leaf i has cluster id i
  std::vector<Merge> merges;        // n-1 entries, nondecreasing heights
};

// Agglomerative average-linkage clustering. Distance ties are broken by the
// lexicographically smallest pair of cluster representative labels (each
// cluster is represented by its smallest leaf label).
Dendrogram hcluster(const Configuration& config);
Dendrogram hcluster(const std::vector<std::string>& labels,
                    const Matrix& distances);

// Height at which each leaf pair first shares a cluster, in leaf-id order.
Matrix cophenetic_distances(const Dendrogram& tree);

// Pearson correlation of the two cophenetic vectors, aligned by label.
double cophenetic_correlation(const Dendrogram& left, const Dendrogram& right);

// Leaf ids in display order (children visited in merge order).
std::vector<Index> leaf_order(const Dendrogram& tree);

// Side-by-side rendering with one straight connector per shared label and
// the cophenetic correlation in the header.
std::string tanglegram_svg(const Dendrogram& left, const Dendrogram& right);

}  // namespace crosstab
