#pragma once

#include <string>

#include "epsflow/field.hpp"

namespace epsflow {

// Self-describing binary field snapshot: magic "EPSFIELD", u32 version,
// i32 k, i32 node counts, f64 spacing, f64 origin[3], i32 domain metadata,
// row-major f64 values, u8 dirichlet mask.
void write_snapshot(const Field& f, const std::string& path);
Field read_snapshot(const std::string& path);

// Legacy structured-points text export readable by common viewers; one
// scalar array per component.
void write_vtk(const Field& f, const std::string& path);

}  // namespace epsflow
