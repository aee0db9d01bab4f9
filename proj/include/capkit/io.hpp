#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "capkit/grid.hpp"

namespace capkit {

/// Parse failure with file/line context in what().
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Text formats, one per payload kind. Layout shared by all three:
//   line 1: "<tag> v1"            tag in {dgf, dms, dst}
//   line 2: "d=<int> n=<int>"
//   line 3: "origin=<d decimals> side=<decimal>"
//   then 2^{d n} whitespace-separated tokens, row-major, last axis fastest.
// Decimals are printed with 17 significant digits so write/read round-trips bitwise.

GridFunction read_grid(const std::filesystem::path& path);
void write_grid(const std::filesystem::path& path, const GridFunction& f);

DyadicSet read_set(const std::filesystem::path& path);
void write_set(const std::filesystem::path& path, const DyadicSet& s);

DiscreteMeasure read_measure(const std::filesystem::path& path);
void write_measure(const std::filesystem::path& path, const DiscreteMeasure& m);

/// 17-significant-digit decimal, the round-trip format used in all files.
std::string format_double(double v);

}  // namespace capkit
