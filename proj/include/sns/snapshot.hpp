#pragma once

#include <string>

#include "sns/field.hpp"

namespace sns {

// SNSF field snapshot container.
//
// Layout: header {magic "SNSF", version u32, n u32, count u32}, then count
// little-endian f64 quadruples (Re u1, Im u1, Re u2, Im u2), one per lattice
// site, in row-major wavevector order: k1 = -n/2 .. n/2-1 outer, k2 inner.
// count is n*n; sites outside the retained set are written as zeros.  The
// reader validates the header and Hermitian symmetry over retained pairs.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::string& path, const VectorField& field);
VectorField read_snapshot(const std::string& path);

}  // namespace sns
