#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "brth/field.hpp"

// Report and checkpoint serialization. Everything here is bit-specified so
// runs diff cleanly: CSV cells are %.16e (lossless for doubles), binary
// dumps are little-endian with a fixed layout.
namespace brth::io {

// One header line, then one line per row; every cell rendered as %.16e.
// Throws if a row length disagrees with the header or the file cannot be
// written.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// Renders a double exactly as the CSV writer does.
std::string csv_number(double value);

// Field dump. Layout, all little-endian:
//   "BRTH" | u32 version | u32 axis count
//   per axis: u64 name length | name bytes | f64 min | f64 max | u64 count
//   payload: row-major (re, im) f64 pairs, one per node.
void write_field(const std::filesystem::path& path, const ComplexField& field);

// Reads a dump back; throws on bad magic, unknown version, or truncation.
ComplexField read_field(const std::filesystem::path& path, Quantity quantity = Quantity::Psi);

inline constexpr std::uint32_t kFieldFormatVersion = 1;

}  // namespace brth::io
