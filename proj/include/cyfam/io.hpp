#pragma once

// CSV grid dumps and directory serialization of admissible forms.

#include <filesystem>
#include <string>

#include "cyfam/family.hpp"

namespace cyfam::io {

/// Header line "# variance=<tags> n=<n> N=<N>", a column header, then one row
/// per node: lattice coordinates followed by real and imaginary parts of every component.
std::string field_csv(const TensorField& t);
void write_field_csv(const std::filesystem::path& path, const TensorField& t);
/// Throws ShapeError if the header does not match the grid or the variance.
TensorField read_field_csv(const std::filesystem::path& path, const GridPtr& grid, const Variance& variance);

/// Real per-node values with lattice coordinates, e.g. eigenvalue fields.
void write_scalar_csv(const std::filesystem::path& path, const FiberGrid& grid, std::span<const double> values,
                      const std::string& column);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// manifest.json (family coefficients, stencil, grid size, provenance) plus one CSV per stored field.
void write_form(const std::filesystem::path& dir, const AdmissibleForm& w);
AdmissibleForm read_form(const std::filesystem::path& dir);

}  // namespace cyfam::io
