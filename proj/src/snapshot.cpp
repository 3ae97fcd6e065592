#include "sns/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sns {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot i/o assumes a little-endian host");

void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const VectorField& field) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open snapshot file for writing: " + path);
  const int n = field.grid->n();
  os.write("SNSF", 4);
  put_u32(os, kSnapshotVersion);
  put_u32(os, static_cast<std::uint32_t>(n));
  put_u32(os, static_cast<std::uint32_t>(n) * static_cast<std::uint32_t>(n));
  std::vector<double> row(static_cast<std::size_t>(n) * 4);
  for (int k1 = -n / 2; k1 <= n / 2 - 1; ++k1) {
    std::size_t p = 0;
    for (int k2 = -n / 2; k2 <= n / 2 - 1; ++k2) {
      const int idx = field.grid->index_of(k1, k2);
      row[p++] = field.c1[idx].real();
      row[p++] = field.c1[idx].imag();
      row[p++] = field.c2[idx].real();
      row[p++] = field.c2[idx].imag();
    }
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("short write on snapshot file: " + path);
}

VectorField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open snapshot file: " + path);
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SNSF", 4) != 0)
    throw std::runtime_error("bad snapshot magic in " + path);
  const std::uint32_t version = get_u32(is);
  if (version != kSnapshotVersion) throw std::runtime_error("unsupported snapshot version");
  const std::uint32_t n = get_u32(is);
  const std::uint32_t count = get_u32(is);
  if (n < 4 || n % 2 != 0 || count != n * n)
    throw std::runtime_error("inconsistent snapshot header in " + path);

  VectorField field(make_grid(static_cast<int>(n)));
  std::vector<double> row(static_cast<std::size_t>(n) * 4);
  const int half = static_cast<int>(n) / 2;
  for (int k1 = -half; k1 <= half - 1; ++k1) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!is) throw std::runtime_error("short read on snapshot file: " + path);
    std::size_t p = 0;
    for (int k2 = -half; k2 <= half - 1; ++k2) {
      const int idx = field.grid->index_of(k1, k2);
      field.c1[idx] = cplx(row[p], row[p + 1]);
      field.c2[idx] = cplx(row[p + 2], row[p + 3]);
      p += 4;
    }
  }

  // Structural checks: zero mode and Nyquist rows empty, Hermitian pairing.
  const int z = field.grid->index_of(0, 0);
  if (std::abs(field.c1[z]) != 0.0 || std::abs(field.c2[z]) != 0.0)
    throw std::runtime_error("snapshot carries a mean mode: " + path);
  for (const Mode& m : field.grid->canonical()) {
    const int neg = field.grid->index_of(-m.k1, -m.k2);
    const double scale = std::max({1.0, std::abs(field.c1[m.idx]), std::abs(field.c2[m.idx])});
    if (std::abs(field.c1[neg] - std::conj(field.c1[m.idx])) > 1e-10 * scale ||
        std::abs(field.c2[neg] - std::conj(field.c2[m.idx])) > 1e-10 * scale)
      throw std::runtime_error("snapshot violates Hermitian symmetry: " + path);
  }
  return field;
}

}  // namespace sns
