#pragma once

#include <string>

#include "nsrl/field.hpp"

namespace nsrl {

/// Snapshot container: magic "NSRL", u32 version=1, u32 n, f64 domain_length,
/// f64 nu, f64 time, then 3*n^3 little-endian float64 physical samples,
/// component-major, x fastest within a component.
struct Snapshot {
    Field field;
    double time = 0.0;
};

void store_snapshot(const Field& field, double time, const std::string& path);
Snapshot load_snapshot(const std::string& path);

} // namespace nsrl
