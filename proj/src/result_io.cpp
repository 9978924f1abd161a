#include "hetsgd/result_io.hpp"

#include "hetsgd/errors.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace hetsgd {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string sanitize(std::string_view name) {
  std::string out(name);
  for (auto& ch : out) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                      ch == '_' || ch == '-';
    if (!keep) ch = '_';
  }
  return out;
}

void append_row(std::string& out, const ResultRow& r) {
  if (r.strategy.find_first_of(",\"\n\r") != std::string::npos) {
    throw InvalidArgument("strategy name may not contain commas, quotes or newlines: " + r.strategy);
  }
  out += r.strategy;
  out += ',';
  out += format_number(r.sweep_param);
  out += ',';
  out += format_number(r.mean);
  out += ',';
  out += format_number(r.std_error);
  out += ',';
  out += std::to_string(r.trials);
  out += ',';
  out += format_number(r.seconds);
  out += '\n';
}

}  // namespace

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw InvalidArgument("cannot format number");
  return std::string(buf.data(), ptr);
}

std::string format_csv(std::span<const ResultRow> rows) {
  std::string out(kResultsHeader);
  out += '\n';
  for (const auto& r : rows) append_row(out, r);
  return out;
}

void emit_csv(std::span<const ResultRow> rows, const std::filesystem::path& path) {
  if (rows.empty()) throw InvalidArgument("emit_csv needs at least one row");
  write_file(path, format_csv(rows));
}

std::vector<std::filesystem::path> emit_plotdata(std::span<const ResultRow> rows,
                                                 const std::filesystem::path& dir) {
  if (rows.empty()) throw InvalidArgument("emit_plotdata needs at least one row");
  std::vector<std::string> order;
  std::map<std::string, std::vector<ResultRow>> series;
  for (const auto& r : rows) {
    auto [it, inserted] = series.try_emplace(r.strategy);
    if (inserted) order.push_back(r.strategy);
    it->second.push_back(r);
  }
  std::vector<std::filesystem::path> written;
  for (const auto& name : order) {
    const auto path = dir / ("plot_" + sanitize(name) + ".csv");
    write_file(path, format_csv(series.at(name)));
    written.push_back(path);
  }
  return written;
}

std::vector<ResultRow> parse_results_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("missing header", line_no);
  if (line != kResultsHeader) throw ParseError("unexpected header '" + line + "'", line_no);

  auto number = [&](const std::string& field) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw ParseError("bad number '" + field + "'", line_no);
    }
    return v;
  };

  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw ParseError("expected 6 fields", line_no);
    ResultRow r;
    r.strategy = fields[0];
    r.sweep_param = number(fields[1]);
    r.mean = number(fields[2]);
    r.std_error = number(fields[3]);
    std::size_t trials = 0;
    const auto [ptr, ec] = std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), trials);
    if (ec != std::errc() || ptr != fields[4].data() + fields[4].size()) {
      throw ParseError("bad trial count '" + fields[4] + "'", line_no);
    }
    r.trials = trials;
    r.seconds = number(fields[5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace hetsgd
