#pragma once

#include <stdexcept>
#include <string>

namespace crosstab {

// Error taxonomy shared by all modules. Codes are stable identifiers a
// caller can branch on; the message carries the offending label/value.
enum class errc {
  dimension_mismatch,
  duplicate_label,
  negative_count,
  empty_table,
  zero_margin,
  index_out_of_range,
  invalid_domain,
  non_finite_input,
  yates_on_non_2x2,
  not_two_by_two,
  too_few_replicates,
  too_many_dimensions,
  dimension_unavailable,
  label_mismatch,
  degenerate_configuration,
  k_out_of_range,
  asymmetric_distances,
  too_few_items,
  empty_input,
  degenerate_marginals,
  no_pairable_values,
  unachievable,
  parse_error,
  io_error,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace crosstab
