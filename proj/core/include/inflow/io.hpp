#pragma once

#include <filesystem>
#include <iosfwd>

#include "inflow/cost.hpp"
#include "inflow/fem_space.hpp"

namespace inflow {

/// Measurement file, version 1. Blank lines and '#' comments are ignored.
///
///   measurements 1
///   variant full|sections|subdomains
///   noise <sigma> <seed> <generator>        (optional)
///   truth <n>                                (optional, then n lines "s gx gy")
///   full:        nodes <count> <scalar_count>, then count lines "id ux uy"
///   sections:    sections <m>, then per section "section <x> <count>" and
///                count lines "y ux uy"
///   subdomains:  subdomains <m>, then per subdomain "subdomain <count>" and
///                one line of element ids; then the nodes block as for full,
///                listing only the nodes of observed elements
///
/// Numbers are written with 17 significant digits, so files round-trip exactly.
void write_measurements(const MeasurementSet& data, const FESpace& space, std::ostream& out);
void save_measurements(const MeasurementSet& data, const FESpace& space, const std::filesystem::path& path);
MeasurementSet read_measurements(std::istream& in);
MeasurementSet load_measurements(const std::filesystem::path& path);

/// Legacy VTK (ASCII) unstructured grid of quadratic triangles over all P2
/// nodes, with point vectors "velocity" and point scalars "pressure" (the
/// linear pressure evaluated at edge midpoints). Output is byte-identical for
/// identical input.
void write_vtk(const FlowField& field, std::ostream& out);
void save_vtk(const FlowField& field, const std::filesystem::path& path);

}  // namespace inflow
