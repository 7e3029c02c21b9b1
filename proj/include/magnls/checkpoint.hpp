#pragma once

#include <string>

#include "magnls/grid.hpp"

namespace magnls {

struct Checkpoint {
  Field field;
  Params params;
  double t = 0.0;
};

/// Binary layout: "MNLS", u32 version, 3 x u32 dims, 3 x f64 half-widths,
/// f64 b, f64 alpha, f64 t, then row-major interleaved (re, im) f64 values.
/// All numbers little-endian.
void write_checkpoint(const std::string& path, const Field& f, const Params& p, double t);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace magnls
