#pragma once

#include <string>
#include "atc/field.hpp"

namespace atc
{

enum class Precision
{
  Complex64,   // two float32 per sample
  Complex128   // two float64 per sample
};

// Self-describing little-endian container:
//   "ATCFIELD" | u32 version | i32 dims[3] | f64 spacing | f64 origin[3]
//   | u32 layout | u32 rank | i32 shape[rank] | u32 bytes per sample | payload
// The file is written to a temporary name and renamed into place.
void write_field(const std::string &path, const Field &f, Precision precision = Precision::Complex64);
Field read_field(const std::string &path);

// CSV of the plane `index` normal to `axis`: in-plane indices, coordinates,
// then real and imaginary part of every component.
void write_slice_csv(const std::string &path, const Field &f, int axis, int index);

// Write `contents` to `path` through a temporary file and an atomic rename.
void write_file_atomic(const std::string &path, const std::string &contents);

}  // namespace atc
