// File formats: the ST3D binary tensor container, CSV cell import/export,
// and the little-endian primitives shared by every on-disk format.
//
// ST3D layout: magic bytes 53 54 33 44 ("ST3D"), three unsigned 32-bit
// little-endian dims (t, r, c), then t*r*c little-endian IEEE-754 doubles in
// row-major order.  CSV layout: header line "t,r,c,value", one cell per row.
// Writers are byte-deterministic: the same tensor always produces the same
// file.

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "fable/tensor.hpp"

namespace fable::io {

// Little-endian stream primitives.  Explicit byte assembly instead of
// memcpy-and-hope keeps the formats well-defined on any host.
void put_u32le(std::ostream& out, std::uint32_t v);
void put_u64le(std::ostream& out, std::uint64_t v);
void put_f64le(std::ostream& out, double v);
std::uint32_t get_u32le(std::istream& in);
std::uint64_t get_u64le(std::istream& in);
double get_f64le(std::istream& in);

void write_st3d(std::ostream& out, const Tensor3& x);
Tensor3 read_st3d(std::istream& in);
void write_st3d_file(const std::filesystem::path& path, const Tensor3& x);
Tensor3 read_st3d_file(const std::filesystem::path& path);

void write_csv(std::ostream& out, const Tensor3& x);
Tensor3 read_csv(std::istream& in);
void write_csv_file(const std::filesystem::path& path, const Tensor3& x);
Tensor3 read_csv_file(const std::filesystem::path& path);

// Shortest decimal form that round-trips a double exactly; used by every
// text format so reruns are byte-identical.
std::string format_double(double v);

}  // namespace fable::io
