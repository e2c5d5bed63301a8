#pragma once

#include <string>
#include <vector>

#include "crosstab/compare.hpp"
#include "crosstab/reliability.hpp"
#include "crosstab/table.hpp"

namespace crosstab {

// Minimal CSV support: comma separator, RFC-style double-quote escaping,
// quoted fields may span lines; CRLF and a UTF-8 BOM are tolerated.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

std::string csv_quote(const std::string& field);

std::string read_file(const std::string& path);

// Writes via a temporary file in the same directory plus rename, so readers
// never observe a half-written file.
void write_file_atomic(const std::string& path, const std::string& content);

// Contingency tables, wide or long layout (sniffed from the header):
//   wide: first header cell blank, then column labels; rows = label, counts
//   long: header `row,col,count[,split]`; duplicate keys are summed
// Long input yields one table per split level, in order of appearance.
std::vector<ContingencyTable> read_tables(const std::string& path);

// Point sets: header `label,x1,...` or a correspondence coordinate dump
// `label,kind,axis1,...`, in which case only rows matching `kind` are kept.
Configuration read_configuration(const std::string& path,
                                 const std::string& kind = "row");

// Ranked mention lists: header `subject,rank,category`; ranks within a
// subject must form 1..m with no gaps or repeats.
MentionLists read_mentions(const std::string& path);

// Coding grid: header `unit,coder,label`; absent (unit, coder) pairs are
// missing codes.
CodingMatrix read_coding(const std::string& path);

}  // namespace crosstab
