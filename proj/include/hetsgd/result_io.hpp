#ifndef HETSGD_RESULT_IO_HPP
#define HETSGD_RESULT_IO_HPP

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hetsgd {

/// One aggregated point of an experiment: a strategy at a sweep value.
struct ResultRow {
  std::string strategy;
  double sweep_param = 0.0;
  double mean = 0.0;
  double std_error = 0.0;  ///< sample stdev / sqrt(trials)
  std::size_t trials = 0;
  double seconds = 0.0;

  bool operator==(const ResultRow&) const = default;
};

inline constexpr std::string_view kResultsHeader = "strategy,sweep_param,mean,stderr,trials,seconds";

/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

/// The CSV text for `rows` under kResultsHeader; byte-deterministic.
std::string format_csv(std::span<const ResultRow> rows);

/// Writes format_csv(rows) to `path`. Throws InvalidArgument on empty rows
/// and IoError (naming the path) when the file cannot be written.
void emit_csv(std::span<const ResultRow> rows, const std::filesystem::path& path);

/// Writes one plot_<strategy>.csv per strategy into `dir`, series in order
/// of first appearance. Characters outside [A-Za-z0-9_-] in the strategy
/// name become '_'. Returns the written paths.
std::vector<std::filesystem::path> emit_plotdata(std::span<const ResultRow> rows,
                                                 const std::filesystem::path& dir);

/// Parses text produced by format_csv; throws ParseError on bad input.
std::vector<ResultRow> parse_results_csv(std::istream& in);

}  // namespace hetsgd

#endif  // HETSGD_RESULT_IO_HPP
