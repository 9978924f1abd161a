#include "hetsgd/dataset_io.hpp"

#include "hetsgd/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hetsgd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool skip_line(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

double parse_number(std::string_view token, std::size_t line_no) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    throw ParseError("cannot parse number '" + std::string(token) + "'", line_no);
  }
  return value;
}

int parse_label(std::string_view token, std::size_t line_no) {
  const double v = parse_number(token, line_no);
  if (v == 1.0) return 1;
  if (v == -1.0 || v == 0.0) return -1;
  throw ParseError("label must be -1, 0 or +1, got '" + std::string(trim(token)) + "'", line_no);
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

Dataset parse_csv(std::istream& in) {
  std::vector<LabeledExample> rows;
  Eigen::Index dim = -1;
  std::size_t first_line = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 2) throw ParseError("row needs a label and at least one feature", line_no);

    LabeledExample ex;
    ex.y = parse_label(fields[0], line_no);
    ex.x.resize(static_cast<Eigen::Index>(fields.size() - 1));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      ex.x[static_cast<Eigen::Index>(i - 1)] = parse_number(fields[i], line_no);
    }
    if (dim < 0) {
      dim = ex.x.size();
      first_line = line_no;
    } else if (ex.x.size() != dim) {
      throw InconsistentDimension("row has " + std::to_string(ex.x.size()) + " features but line " +
                                      std::to_string(first_line) + " has " + std::to_string(dim),
                                  line_no);
    }
    rows.push_back(std::move(ex));
  }
  if (rows.empty()) throw EmptyFile("no examples found");
  Dataset data(dim, std::move(rows));
  data.normalize_to_unit_ball();
  return data;
}

Dataset ingest_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_csv(in);
}

Dataset parse_libsvm(std::istream& in) {
  struct SparseRow {
    int y;
    std::vector<std::pair<Eigen::Index, double>> entries;
  };
  std::vector<SparseRow> rows;
  Eigen::Index dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    if (trim(text).empty()) continue;

    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto start = text.find_first_not_of(" \t\r", pos);
      if (start == std::string_view::npos) break;
      auto end = text.find_first_of(" \t\r", start);
      if (end == std::string_view::npos) end = text.size();
      tokens.push_back(text.substr(start, end - start));
      pos = end;
    }

    SparseRow row{parse_label(tokens[0], line_no), {}};
    Eigen::Index last_index = 0;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const auto colon = tokens[i].find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected index:value, got '" + std::string(tokens[i]) + "'", line_no);
      }
      const std::string_view idx_text = tokens[i].substr(0, colon);
      long long idx = 0;
      const auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
      if (ec != std::errc() || ptr != idx_text.data() + idx_text.size() || idx < 1) {
        throw ParseError("feature index must be a positive integer, got '" + std::string(idx_text) + "'",
                         line_no);
      }
      if (idx <= last_index) throw ParseError("feature indices must be strictly increasing", line_no);
      last_index = static_cast<Eigen::Index>(idx);
      row.entries.emplace_back(last_index - 1, parse_number(tokens[i].substr(colon + 1), line_no));
    }
    dim = std::max(dim, last_index);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyFile("no examples found");
  if (dim == 0) throw ParseError("no features found in any row", line_no);

  Dataset data(dim);
  for (auto& row : rows) {
    LabeledExample ex{Vector::Zero(dim), row.y};
    for (const auto& [i, v] : row.entries) ex.x[i] = v;
    data.push_back(std::move(ex));
  }
  data.normalize_to_unit_ball();
  return data;
}

Dataset ingest_libsvm(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_libsvm(in);
}

}  // namespace hetsgd
