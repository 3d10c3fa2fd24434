#include "brth/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace brth::io {

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f64(std::ofstream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t take_u64(std::ifstream& in, const std::filesystem::path& path) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8))
    throw std::runtime_error("read_field: truncated dump: " + path.string());
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint32_t take_u32(std::ifstream& in, const std::filesystem::path& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error("read_field: truncated dump: " + path.string());
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double take_f64(std::ifstream& in, const std::filesystem::path& path) {
  return std::bit_cast<double>(take_u64(in, path));
}

}  // namespace

std::string csv_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  if (columns.empty()) throw std::invalid_argument("write_csv: need at least one column");
  std::ofstream out(path, std::ios::binary);  // binary keeps \n literal everywhere
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out << ',';
    out << columns[c];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::invalid_argument("write_csv: row width disagrees with the header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << csv_number(row[c]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

void write_field(const std::filesystem::path& path, const ComplexField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field: cannot open " + path.string());
  const SpacetimeGrid& grid = field.grid();
  out.write("BRTH", 4);
  put_u32(out, kFieldFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(grid.rank()));
  for (const Axis& ax : grid.axes()) {
    put_u64(out, ax.name.size());
    out.write(ax.name.data(), static_cast<std::streamsize>(ax.name.size()));
    put_f64(out, ax.min);
    put_f64(out, ax.max);
    put_u64(out, ax.count);
  }
  for (const cplx& v : field.values()) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  if (!out) throw std::runtime_error("write_field: write failed for " + path.string());
}

ComplexField read_field(const std::filesystem::path& path, Quantity quantity) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_field: cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "BRTH", 4) != 0)
    throw std::runtime_error("read_field: bad magic in " + path.string());
  const std::uint32_t version = take_u32(in, path);
  if (version != kFieldFormatVersion)
    throw std::runtime_error("read_field: unsupported format version in " + path.string());
  const std::uint32_t rank = take_u32(in, path);
  if (rank == 0 || rank > 4)
    throw std::runtime_error("read_field: implausible axis count in " + path.string());

  std::vector<Axis> axes;
  for (std::uint32_t a = 0; a < rank; ++a) {
    const std::uint64_t len = take_u64(in, path);
    if (len > 64) throw std::runtime_error("read_field: implausible axis name in " + path.string());
    std::string name(len, '\0');
    if (!in.read(name.data(), static_cast<std::streamsize>(len)))
      throw std::runtime_error("read_field: truncated dump: " + path.string());
    Axis ax;
    ax.name = std::move(name);
    ax.min = take_f64(in, path);
    ax.max = take_f64(in, path);
    ax.count = take_u64(in, path);
    axes.push_back(std::move(ax));
  }
  SpacetimeGrid grid = build_grid(axes);

  std::vector<cplx> values(grid.size());
  for (cplx& v : values) {
    const double re = take_f64(in, path);
    const double im = take_f64(in, path);
    v = {re, im};
  }
  return ComplexField(std::move(grid), std::move(values), quantity);
}

}  // namespace brth::io
