#include "fable/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fable/error.hpp"

namespace fable::io {

namespace {

constexpr char kMagic[4] = {'S', 'T', '3', 'D'};

[[noreturn]] void io_fail(const std::string& what) { raise("IoError", what); }

}  // namespace

void put_u32le(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64le(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f64le(std::ostream& out, double v) {
  put_u64le(out, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t get_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) io_fail("unexpected end of stream reading u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) io_fail("unexpected end of stream reading u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64le(std::istream& in) {
  return std::bit_cast<double>(get_u64le(in));
}

void write_st3d(std::ostream& out, const Tensor3& x) {
  out.write(kMagic, 4);
  put_u32le(out, static_cast<std::uint32_t>(x.dims().t));
  put_u32le(out, static_cast<std::uint32_t>(x.dims().r));
  put_u32le(out, static_cast<std::uint32_t>(x.dims().c));
  for (double v : x.values()) put_f64le(out, v);
  if (!out) io_fail("write failed");
}

Tensor3 read_st3d(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    raise("CorruptFile", "bad ST3D magic");
  }
  Dims3 dims;
  dims.t = get_u32le(in);
  dims.r = get_u32le(in);
  dims.c = get_u32le(in);
  std::vector<double> values(dims.count());
  for (double& v : values) v = get_f64le(in);
  return Tensor3(dims, std::move(values));
}

void write_st3d_file(const std::filesystem::path& path, const Tensor3& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail("cannot open " + path.string() + " for writing");
  write_st3d(out, x);
}

Tensor3 read_st3d_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open " + path.string());
  return read_st3d(in);
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Tensor3& x) {
  out << "t,r,c,value\n";
  const Dims3& d = x.dims();
  for (std::size_t t = 0; t < d.t; ++t) {
    for (std::size_t r = 0; r < d.r; ++r) {
      for (std::size_t c = 0; c < d.c; ++c) {
        out << t << ',' << r << ',' << c << ',' << format_double(x(t, r, c))
            << '\n';
      }
    }
  }
  if (!out) io_fail("write failed");
}

Tensor3 read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) raise("CorruptFile", "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,r,c,value") {
    raise("CorruptFile", "expected header 't,r,c,value', got '" + line + "'");
  }
  struct Cell {
    std::size_t t, r, c;
    double value;
  };
  std::vector<Cell> cells;
  Dims3 dims{0, 0, 0};
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Cell cell{};
    std::istringstream row(line);
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(row >> cell.t >> c1 >> cell.r >> c2 >> cell.c >> c3 >>
          cell.value) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      raise("CorruptFile", "bad CSV row at line " + std::to_string(line_no));
    }
    dims.t = std::max(dims.t, cell.t + 1);
    dims.r = std::max(dims.r, cell.r + 1);
    dims.c = std::max(dims.c, cell.c + 1);
    cells.push_back(cell);
  }
  if (cells.empty()) raise("CorruptFile", "CSV has no data rows");
  if (cells.size() != dims.count()) {
    raise("CorruptFile", "CSV covers " + std::to_string(cells.size()) +
                             " cells but implied dims need " +
                             std::to_string(dims.count()));
  }
  std::vector<double> values(dims.count(),
                             std::numeric_limits<double>::quiet_NaN());
  for (const Cell& cell : cells) {
    values[(cell.t * dims.r + cell.r) * dims.c + cell.c] = cell.value;
  }
  for (double v : values) {
    if (std::isnan(v)) raise("CorruptFile", "CSV leaves cells unset");
  }
  return Tensor3(dims, std::move(values));
}

void write_csv_file(const std::filesystem::path& path, const Tensor3& x) {
  std::ofstream out(path);
  if (!out) io_fail("cannot open " + path.string() + " for writing");
  write_csv(out, x);
}

Tensor3 read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) io_fail("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace fable::io
