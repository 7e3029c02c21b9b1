#include "magnls/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "magnls/errors.hpp"

namespace magnls {

namespace {

constexpr char kMagic[4] = {'M', 'N', 'L', 'S'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw InvalidArgument("checkpoint " + path + ": truncated file");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const Field& f, const Params& p, double t) {
  f.check_shape();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("checkpoint " + path + ": cannot open for writing");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  const Grid& g = f.grid();
  for (int j = 0; j < 3; ++j) put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n(j)));
  for (int j = 0; j < 3; ++j) put<double>(out, g.half_width(j));
  put<double>(out, p.b);
  put<double>(out, p.alpha);
  put<double>(out, t);
  for (const complex& v : f.values()) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  if (!out) throw InvalidArgument("checkpoint " + path + ": write failed");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("checkpoint " + path + ": cannot open");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw InvalidArgument("checkpoint " + path + ": bad magic");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion)
    throw InvalidArgument("checkpoint " + path + ": unsupported version " + std::to_string(version));
  std::array<int, 3> dims;
  std::array<double, 3> half;
  for (int j = 0; j < 3; ++j) dims[j] = static_cast<int>(get<std::uint32_t>(in, path));
  for (int j = 0; j < 3; ++j) half[j] = get<double>(in, path);
  Params p;
  p.b = get<double>(in, path);
  p.alpha = get<double>(in, path);
  const double t = get<double>(in, path);
  Grid g(dims, half);
  std::vector<complex> vals(g.size());
  for (auto& v : vals) {
    const double re = get<double>(in, path);
    const double im = get<double>(in, path);
    v = complex(re, im);
  }
  return {Field(g, std::move(vals)), p, t};
}

}  // namespace magnls
