#include "crosstab/reliability.hpp"

#include <unordered_map>
#include <unordered_set>

#include "crosstab/errors.hpp"

namespace crosstab {

MentionLists MentionLists::build(
    std::vector<std::vector<std::string>> lists) {
  for (std::size_t s = 0; s < lists.size(); ++s) {
    std::unordered_set<std::string> seen;
    for (const auto& category : lists[s])
      if (!seen.insert(category).second)
        raise(errc::invalid_domain,
              "subject " + std::to_string(s + 1) +
                  " mentions a category twice: " + category);
  }
  MentionLists mentions;
  mentions.lists_ = std::move(lists);
  return mentions;
}

std::map<std::string, Csi> cognitive_salience(const MentionLists& mentions) {
  if (mentions.subjects() == 0)
    raise(errc::empty_input, "no subjects in mention lists");

  struct Tally {
    std::int64_t count = 0;
    std::int64_t rank_sum = 0;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& list : mentions.lists()) {
    for (std::size_t pos = 0; pos < list.size(); ++pos) {
      Tally& tally = tallies[list[pos]];
      ++tally.count;
      tally.rank_sum += static_cast<std::int64_t>(pos) + 1;
    }
  }

  const double n_subjects = static_cast<double>(mentions.subjects());
  std::map<std::string, Csi> result;
  for (const auto& [category, tally] : tallies) {
    Csi csi;
    csi.mentions = tally.count;
    csi.mean_rank = static_cast<double>(tally.rank_sum) /
                    static_cast<double>(tally.count);
    csi.value = static_cast<double>(tally.count) /
                (n_subjects * csi.mean_rank);
    result[category] = csi;
  }
  return result;
}

CodingMatrix CodingMatrix::build(
    std::vector<std::string> units, std::vector<std::string> coders,
    std::vector<std::vector<std::optional<std::string>>> codes) {
  if (coders.size() < 2)
    raise(errc::invalid_domain, "need at least 2 coders");
  if (units.empty()) raise(errc::empty_input, "no units to code");
  if (codes.size() != units.size())
    raise(errc::dimension_mismatch, "one code row per unit required");
  for (const auto& row : codes)
    if (row.size() != coders.size())
      raise(errc::dimension_mismatch, "one code per coder required");

  auto check_unique = [](const std::vector<std::string>& labels,
                         const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& label : labels)
      if (!seen.insert(label).second)
        raise(errc::duplicate_label,
              std::string("duplicate ") + what + " label: " + label);
  };
  check_unique(units, "unit");
  check_unique(coders, "coder");

  CodingMatrix matrix;
  matrix.unit_labels_ = std::move(units);
  matrix.coder_labels_ = std::move(coders);
  matrix.codes_ = std::move(codes);
  return matrix;
}

double cohens_kappa(const CodingMatrix& matrix) {
  if (matrix.coders() != 2)
    raise(errc::invalid_domain, "kappa is defined for exactly 2 coders");

  const std::int64_t n = static_cast<std::int64_t>(matrix.units());
  std::int64_t agreements = 0;
  std::unordered_map<std::string, std::int64_t> first, second;
  for (std::size_t u = 0; u < matrix.units(); ++u) {
    const auto& a = matrix.code(u, 0);
    const auto& b = matrix.code(u, 1);
    if (!a || !b)
      raise(errc::invalid_domain, "kappa requires complete codings");
    if (*a == *b) ++agreements;
    ++first[*a];
    ++second[*b];
  }

  std::int64_t expected_num = 0;  // n^2 * p_e
  for (const auto& [label, count] : first) {
    auto it = second.find(label);
    if (it != second.end()) expected_num += count * it->second;
  }

  const std::int64_t denominator = n * n - expected_num;  // n^2 * (1 - p_e)
  if (denominator == 0)
    raise(errc::degenerate_marginals,
          "expected agreement is 1; kappa is undefined");
  return static_cast<double>(agreements * n - expected_num) /
         static_cast<double>(denominator);
}

double krippendorff_alpha(const CodingMatrix& matrix) {
  // Coincidence tallies: each ordered pair of values within a unit with m
  // non-missing codes contributes 1/(m-1).
  std::unordered_map<std::string, double> value_totals;
  double matches = 0.0;  // weighted coincidences of equal ordered pairs
  double total = 0.0;    // n: number of pairable values

  for (std::size_t u = 0; u < matrix.units(); ++u) {
    std::vector<const std::string*> present;
    for (std::size_t c = 0; c < matrix.coders(); ++c)
      if (matrix.code(u, c)) present.push_back(&*matrix.code(u, c));
    const std::size_t m = present.size();
    if (m < 2) continue;

    const double weight = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
      value_totals[*present[i]] += 1.0;
      for (std::size_t j = 0; j < m; ++j)
        if (i != j && *present[i] == *present[j]) matches += weight;
    }
    total += static_cast<double>(m);
  }

  if (total == 0.0)
    raise(errc::no_pairable_values,
          "no unit carries two or more non-missing codes");

  double sum_squares = 0.0;
  for (const auto& [label, count] : value_totals)
    sum_squares += count * count;

  const double observed_disagreement = (total - matches) / total;
  const double expected_disagreement =
      (total * total - sum_squares) / (total * (total - 1.0));
  if (expected_disagreement == 0.0) {
    if (observed_disagreement == 0.0) return 1.0;
    raise(errc::degenerate_marginals,
          "all pairable values share one label yet disagreement was "
          "observed");
  }
  return 1.0 - observed_disagreement / expected_disagreement;
}

}  // namespace crosstab
