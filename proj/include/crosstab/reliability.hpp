#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crosstab {

// Per-subject ordered mention lists; the first entry of a list has rank 1.
class MentionLists {
 public:
  // Each inner sequence is one subject's mentions in rank order. A category
  // may appear at most once per subject.
  static MentionLists build(std::vector<std::vector<std::string>> lists);

  std::size_t subjects() const { return lists_.size(); }
  const std::vector<std::vector<std::string>>& lists() const { return lists_; }

 private:
  MentionLists() = default;
  std::vector<std::vector<std::string>> lists_;
};

struct Csi {
  std::int64_t mentions = 0;  // n_j: subjects mentioning the category
  double mean_rank = 0.0;     // mean rank over mentioners only
  double value = 0.0;         // n_j / (N * mean_rank)
};

// Cognitive salience per category, keyed by category label; categories never
// mentioned do not appear.
std::map<std::string, Csi> cognitive_salience(const MentionLists& mentions);

// units x coders grid of categorical codes; empty optional = missing.
class CodingMatrix {
 public:
  static CodingMatrix build(
      std::vector<std::string> units, std::vector<std::string> coders,
      std::vector<std::vector<std::optional<std::string>>> codes);

  std::size_t units() const { return unit_labels_.size(); }
  std::size_t coders() const { return coder_labels_.size(); }
  const std::vector<std::string>& unit_labels() const { return unit_labels_; }
  const std::vector<std::string>& coder_labels() const {
    return coder_labels_;
  }
  const std::optional<std::string>& code(std::size_t unit,
                                         std::size_t coder) const {
    return codes_[unit][coder];
  }

 private:
  CodingMatrix() = default;
  std::vector<std::string> unit_labels_;
  std::vector<std::string> coder_labels_;
  std::vector<std::vector<std::optional<std::string>>> codes_;
};

// Two coders, no missing cells. kappa = (p_o - p_e) / (1 - p_e) with p_e
// from the product of the coders' marginal code distributions; computed
// from integer tallies so rational results are exact to the last bit.
double cohens_kappa(const CodingMatrix& matrix);

// Nominal-metric alpha over all pairable values; units with fewer than two
// non-missing codes are dropped.
double krippendorff_alpha(const CodingMatrix& matrix);

}  // namespace crosstab
