#include "crosstab/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "crosstab/errors.hpp"

namespace crosstab {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::int64_t parse_int(const std::string& field, const std::string& where) {
  const std::string value = trim(field);
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                   out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    raise(errc::parse_error, "expected an integer " + where + ", got '" +
                                 field + "'");
  return out;
}

double parse_double(const std::string& field, const std::string& where) {
  const std::string value = trim(field);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                   out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    raise(errc::parse_error,
          "expected a number " + where + ", got '" + field + "'");
  return out;
}

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return text;
}

void check_width(const std::vector<std::string>& record, std::size_t want,
                 std::size_t line) {
  if (record.size() != want)
    raise(errc::parse_error, "line " + std::to_string(line) + ": expected " +
                                 std::to_string(want) + " fields, got " +
                                 std::to_string(record.size()));
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;

  std::size_t start = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) start = 3;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t pos = start; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (quoted) {
      if (ch == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field.empty() && !field_started) {
          quoted = true;
          field_started = true;
        } else {
          field += ch;
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field += ch;
        field_started = true;
        break;
    }
  }
  if (quoted) raise(errc::parse_error, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    out += ch;
    if (ch == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) raise(errc::io_error, "cannot open " + path);
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  if (stream.bad()) raise(errc::io_error, "cannot read " + path);
  return buffer.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir =
      target.has_parent_path() ? target.parent_path() : fs::path(".");
  const fs::path temp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream stream(temp, std::ios::binary | std::ios::trunc);
    if (!stream) raise(errc::io_error, "cannot write " + temp.string());
    stream.write(content.data(),
                 static_cast<std::streamsize>(content.size()));
    stream.flush();
    if (!stream) raise(errc::io_error, "cannot write " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    raise(errc::io_error, "cannot move output into place: " + path);
  }
}

namespace {

std::vector<ContingencyTable> read_wide(
    const std::vector<std::vector<std::string>>& records) {
  const auto& header = records[0];
  if (header.size() < 3)
    raise(errc::parse_error, "wide table needs at least 2 data columns");

  std::vector<std::string> col_labels(header.begin() + 1, header.end());
  std::vector<std::string> row_labels;
  IntMatrix counts(static_cast<Index>(records.size() - 1),
                   static_cast<Index>(col_labels.size()));
  for (std::size_t rec = 1; rec < records.size(); ++rec) {
    check_width(records[rec], header.size(), rec + 1);
    row_labels.push_back(records[rec][0]);
    for (std::size_t j = 1; j < records[rec].size(); ++j)
      counts(static_cast<Index>(rec - 1), static_cast<Index>(j - 1)) =
          parse_int(records[rec][j],
                    "at line " + std::to_string(rec + 1) + " column " +
                        std::to_string(j + 1));
  }
  std::vector<ContingencyTable> tables;
  tables.push_back(ContingencyTable::build(std::move(row_labels),
                                           std::move(col_labels),
                                           std::move(counts)));
  return tables;
}

std::vector<ContingencyTable> read_long(
    const std::vector<std::vector<std::string>>& records, bool has_split) {
  struct Accumulator {
    std::vector<std::string> rows, cols;
    std::unordered_map<std::string, Index> row_index, col_index;
    std::map<std::pair<Index, Index>, std::int64_t> cells;
  };
  std::vector<std::string> splits;
  std::unordered_map<std::string, std::size_t> split_index;
  std::vector<Accumulator> groups;

  const std::size_t width = has_split ? 4 : 3;
  for (std::size_t rec = 1; rec < records.size(); ++rec) {
    check_width(records[rec], width, rec + 1);
    const std::string split = has_split ? records[rec][3] : "";
    auto [it, fresh] = split_index.try_emplace(split, groups.size());
    if (fresh) {
      splits.push_back(split);
      groups.emplace_back();
    }
    Accumulator& group = groups[it->second];

    auto intern = [](const std::string& label, std::vector<std::string>& pool,
                     std::unordered_map<std::string, Index>& index) {
      auto [entry, added] =
          index.try_emplace(label, static_cast<Index>(pool.size()));
      if (added) pool.push_back(label);
      return entry->second;
    };
    const Index i = intern(records[rec][0], group.rows, group.row_index);
    const Index j = intern(records[rec][1], group.cols, group.col_index);
    const std::int64_t count =
        parse_int(records[rec][2], "at line " + std::to_string(rec + 1));
    if (count < 0)
      raise(errc::negative_count,
            "line " + std::to_string(rec + 1) + ": negative count");
    group.cells[{i, j}] += count;
  }

  std::vector<ContingencyTable> tables;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Accumulator& group = groups[g];
    IntMatrix counts = IntMatrix::Zero(static_cast<Index>(group.rows.size()),
                                       static_cast<Index>(group.cols.size()));
    for (const auto& [cell, count] : group.cells)
      counts(cell.first, cell.second) = count;
    std::optional<std::string> split;
    if (has_split) split = splits[g];
    tables.push_back(ContingencyTable::build(group.rows, group.cols,
                                             std::move(counts), split));
  }
  return tables;
}

}  // namespace

std::vector<ContingencyTable> read_tables(const std::string& path) {
  const auto records = parse_csv(read_file(path));
  if (records.empty()) raise(errc::parse_error, path + ": empty file");
  const auto& header = records[0];
  if (records.size() < 2)
    raise(errc::parse_error, path + ": no data rows");

  if (trim(header[0]).empty()) return read_wide(records);

  std::vector<std::string> lowered;
  for (const auto& cell : header) lowered.push_back(lower(trim(cell)));
  if (lowered.size() >= 3 && lowered[0] == "row" && lowered[1] == "col" &&
      lowered[2] == "count") {
    if (lowered.size() == 3) return read_long(records, false);
    if (lowered.size() == 4 && lowered[3] == "split")
      return read_long(records, true);
  }
  raise(errc::parse_error,
        path + ": expected a wide table (blank first header cell) or a long "
               "table (header row,col,count[,split])");
}

Configuration read_configuration(const std::string& path,
                                 const std::string& kind) {
  const auto records = parse_csv(read_file(path));
  if (records.empty()) raise(errc::parse_error, path + ": empty file");
  const auto& header = records[0];
  if (header.size() < 2 || lower(trim(header[0])) != "label")
    raise(errc::parse_error,
          path + ": expected header label,x1,... or label,kind,axis1,...");
  if (records.size() < 2) raise(errc::parse_error, path + ": no data rows");

  const bool has_kind = header.size() >= 3 && lower(trim(header[1])) == "kind";
  const std::size_t coord_start = has_kind ? 2 : 1;
  const std::size_t dims = header.size() - coord_start;
  if (dims < 1) raise(errc::parse_error, path + ": no coordinate columns");

  std::vector<std::string> labels;
  std::vector<std::vector<double>> points;
  for (std::size_t rec = 1; rec < records.size(); ++rec) {
    check_width(records[rec], header.size(), rec + 1);
    if (has_kind && records[rec][1] != kind) continue;
    labels.push_back(records[rec][0]);
    std::vector<double> point;
    for (std::size_t d = coord_start; d < records[rec].size(); ++d)
      point.push_back(parse_double(records[rec][d],
                                   "at line " + std::to_string(rec + 1)));
    points.push_back(std::move(point));
  }
  if (labels.empty())
    raise(errc::parse_error,
          path + ": no rows of kind '" + kind + "' in coordinate dump");

  Matrix coords(static_cast<Index>(points.size()), static_cast<Index>(dims));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t d = 0; d < dims; ++d)
      coords(static_cast<Index>(i), static_cast<Index>(d)) = points[i][d];
  return Configuration::build(std::move(labels), std::move(coords));
}

MentionLists read_mentions(const std::string& path) {
  const auto records = parse_csv(read_file(path));
  if (records.empty()) raise(errc::parse_error, path + ": empty file");
  const auto& header = records[0];
  if (header.size() != 3 || lower(trim(header[0])) != "subject" ||
      lower(trim(header[1])) != "rank" || lower(trim(header[2])) != "category")
    raise(errc::parse_error, path + ": expected header subject,rank,category");
  if (records.size() < 2) raise(errc::parse_error, path + ": no data rows");

  std::vector<std::string> subjects;
  std::unordered_map<std::string, std::size_t> subject_index;
  std::vector<std::map<std::int64_t, std::string>> ranked;

  for (std::size_t rec = 1; rec < records.size(); ++rec) {
    check_width(records[rec], 3, rec + 1);
    const std::string& subject = records[rec][0];
    auto [it, fresh] = subject_index.try_emplace(subject, subjects.size());
    if (fresh) {
      subjects.push_back(subject);
      ranked.emplace_back();
    }
    const std::int64_t rank =
        parse_int(records[rec][1], "at line " + std::to_string(rec + 1));
    if (rank < 1)
      raise(errc::parse_error,
            "line " + std::to_string(rec + 1) + ": ranks start at 1");
    auto [slot, vacant] = ranked[it->second].try_emplace(rank, records[rec][2]);
    if (!vacant)
      raise(errc::parse_error, "line " + std::to_string(rec + 1) +
                                   ": subject " + subject +
                                   " has two entries at rank " +
                                   std::to_string(rank));
  }

  std::vector<std::vector<std::string>> lists;
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    std::vector<std::string> list;
    std::int64_t expected_rank = 1;
    for (const auto& [rank, category] : ranked[s]) {
      if (rank != expected_rank)
        raise(errc::parse_error, "subject " + subjects[s] +
                                     ": ranks must be 1..m with no gaps "
                                     "(missing rank " +
                                     std::to_string(expected_rank) + ")");
      ++expected_rank;
      list.push_back(category);
    }
    std::unordered_map<std::string, int> dedup;
    for (const auto& category : list)
      if (++dedup[category] > 1)
        raise(errc::parse_error, "subject " + subjects[s] +
                                     " mentions a category twice: " +
                                     category);
    lists.push_back(std::move(list));
  }
  return MentionLists::build(std::move(lists));
}

CodingMatrix read_coding(const std::string& path) {
  const auto records = parse_csv(read_file(path));
  if (records.empty()) raise(errc::parse_error, path + ": empty file");
  const auto& header = records[0];
  if (header.size() != 3 || lower(trim(header[0])) != "unit" ||
      lower(trim(header[1])) != "coder" || lower(trim(header[2])) != "label")
    raise(errc::parse_error, path + ": expected header unit,coder,label");
  if (records.size() < 2) raise(errc::parse_error, path + ": no data rows");

  std::vector<std::string> units, coders;
  std::unordered_map<std::string, std::size_t> unit_index, coder_index;
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> entries;

  for (std::size_t rec = 1; rec < records.size(); ++rec) {
    check_width(records[rec], 3, rec + 1);
    auto intern = [](const std::string& label, std::vector<std::string>& pool,
                     std::unordered_map<std::string, std::size_t>& index) {
      auto [entry, added] = index.try_emplace(label, pool.size());
      if (added) pool.push_back(label);
      return entry->second;
    };
    const std::size_t u = intern(records[rec][0], units, unit_index);
    const std::size_t c = intern(records[rec][1], coders, coder_index);
    entries.emplace_back(u, c, records[rec][2]);
  }

  std::vector<std::vector<std::optional<std::string>>> codes(
      units.size(),
      std::vector<std::optional<std::string>>(coders.size()));
  for (const auto& [u, c, label] : entries) {
    if (codes[u][c])
      raise(errc::parse_error, "duplicate code for unit " + units[u] +
                                   ", coder " + coders[c]);
    codes[u][c] = label;
  }
  return CodingMatrix::build(std::move(units), std::move(coders),
                             std::move(codes));
}

}  // namespace crosstab
