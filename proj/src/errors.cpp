#include "crosstab/errors.hpp"

namespace crosstab {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::duplicate_label: return "DuplicateLabel";
    case errc::negative_count: return "NegativeCount";
    case errc::empty_table: return "EmptyTable";
    case errc::zero_margin: return "ZeroMargin";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::invalid_domain: return "InvalidDomain";
    case errc::non_finite_input: return "NonFiniteInput";
    case errc::yates_on_non_2x2: return "YatesOnNon2x2";
    case errc::not_two_by_two: return "NotTwoByTwo";
    case errc::too_few_replicates: return "TooFewReplicates";
    case errc::too_many_dimensions: return "TooManyDimensions";
    case errc::dimension_unavailable: return "DimensionUnavailable";
    case errc::label_mismatch: return "LabelMismatch";
    case errc::degenerate_configuration: return "DegenerateConfiguration";
    case errc::k_out_of_range: return "KOutOfRange";
    case errc::asymmetric_distances: return "AsymmetricDistances";
    case errc::too_few_items: return "TooFewItems";
    case errc::empty_input: return "EmptyInput";
    case errc::degenerate_marginals: return "DegenerateMarginals";
    case errc::no_pairable_values: return "NoPairableValues";
    case errc::unachievable: return "Unachievable";
    case errc::parse_error: return "ParseError";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace crosstab
