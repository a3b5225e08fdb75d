#pragma once

#include <string>
#include <vector>

#include "dgair/analysis.hpp"
#include "dgair/solver.hpp"
#include "dgair/space.hpp"

namespace dgair {

/// Legacy ASCII VTK unstructured grid with three private points per triangle
/// (cell type 5) and POINT_DATA scalar `u` evaluated elementwise at the vertices.
/// Throws std::runtime_error when the file cannot be written.
void write_vtk(const Mesh& mesh, const DGField& field, const std::string& path);

/// step,t,l2_norm,mass[,l2_error,energy_error]
void write_observers_csv(const std::vector<ObserverSample>& samples, const std::string& path);

/// level,h,dofs,l2_error,energy_error,l2_order,energy_order; orders blank on the first row.
void write_convergence_csv(const ConvergenceReport& report, const std::string& path);

/// Human-readable summary comparing observed orders with the reference order.
std::string convergence_summary(const ConvergenceReport& report);

/// %.17g
std::string format_number(double v);

}  // namespace dgair
