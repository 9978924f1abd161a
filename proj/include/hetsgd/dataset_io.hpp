#ifndef HETSGD_DATASET_IO_HPP
#define HETSGD_DATASET_IO_HPP

#include "hetsgd/core.hpp"

#include <filesystem>
#include <istream>

namespace hetsgd {

/// Dense CSV, one example per line: label first, then the features.
/// Labels may be -1/+1 or 0/1 (0 maps to -1). Blank lines and lines starting
/// with '#' are skipped. The result is normalized to the unit ball.
///
/// Throws ParseError (with the 1-based line number), EmptyFile when no
/// example is found, or InconsistentDimension when rows differ in length.
Dataset parse_csv(std::istream& in);
Dataset ingest_csv(const std::filesystem::path& path);

/// libsvm sparse text: "label idx:value idx:value ..." with 1-based,
/// strictly increasing indices. The dimension is the largest index seen.
Dataset parse_libsvm(std::istream& in);
Dataset ingest_libsvm(const std::filesystem::path& path);

}  // namespace hetsgd

#endif  // HETSGD_DATASET_IO_HPP
