#include "dgair/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dgair {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_vtk(const Mesh& mesh, const DGField& field, const std::string& path) {
  auto out = open_output(path);
  const std::size_t nt = mesh.num_triangles();
  out << "# vtk DataFile Version 3.0\n"
      << "dgair field t=" << format_number(field.t) << "\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n"
      << "POINTS " << 3 * nt << " double\n";
  for (const auto& tri : mesh.triangles())
    for (int v : tri.v) {
      const Point& p = mesh.vertices()[static_cast<std::size_t>(v)];
      out << format_number(p.x) << " " << format_number(p.y) << " 0\n";
    }
  out << "CELLS " << nt << " " << 4 * nt << "\n";
  for (std::size_t t = 0; t < nt; ++t) out << "3 " << 3 * t << " " << 3 * t + 1 << " " << 3 * t + 2 << "\n";
  out << "CELL_TYPES " << nt << "\n";
  for (std::size_t t = 0; t < nt; ++t) out << "5\n";
  out << "POINT_DATA " << 3 * nt << "\n"
      << "SCALARS u double 1\n"
      << "LOOKUP_TABLE default\n";
  const Point corners[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  for (std::size_t t = 0; t < nt; ++t)
    for (const Point& r : corners) out << format_number(eval_field(field, t, r)) << "\n";
  close_output(out, path);
}

void write_observers_csv(const std::vector<ObserverSample>& samples, const std::string& path) {
  auto out = open_output(path);
  const bool errors = !samples.empty() && samples.front().l2_error.has_value();
  out << "step,t,l2_norm,mass" << (errors ? ",l2_error,energy_error" : "") << "\n";
  for (const auto& s : samples) {
    out << s.step << "," << format_number(s.t) << "," << format_number(s.l2_norm) << "," << format_number(s.mass);
    if (errors) out << "," << format_number(s.l2_error.value()) << "," << format_number(s.energy_error.value());
    out << "\n";
  }
  close_output(out, path);
}

void write_convergence_csv(const ConvergenceReport& report, const std::string& path) {
  auto out = open_output(path);
  out << "level,h,dofs,l2_error,energy_error,l2_order,energy_order\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const auto& l = report.levels[i];
    out << i << "," << format_number(l.h) << "," << l.dofs << "," << format_number(l.l2_error) << ","
        << format_number(l.energy_error) << ",";
    if (report.l2_orders[i]) out << format_number(*report.l2_orders[i]);
    out << ",";
    if (report.energy_orders[i]) out << format_number(*report.energy_orders[i]);
    out << "\n";
  }
  close_output(out, path);
}

std::string convergence_summary(const ConvergenceReport& report) {
  std::ostringstream s;
  s << "problem " << report.problem << ", k = " << report.k << ", scheme " << scheme_name(report.scheme)
    << ", integrator " << integrator_name(report.integrator) << "\n";
  s << "   n          h     dofs       dt  steps      l2_error  energy_error  l2_order  energy_order\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const auto& l = report.levels[i];
    char row[256];
    std::snprintf(row, sizeof row, "%4d  %9.3e  %7zu  %7.1e  %5zu  %12.5e  %12.5e", l.n, l.h, l.dofs, l.dt, l.steps,
                  l.l2_error, l.energy_error);
    s << row;
    s << "  " << (report.l2_orders[i] ? format_fixed(*report.l2_orders[i], 3) : std::string("    -")) << "     "
      << (report.energy_orders[i] ? format_fixed(*report.energy_orders[i], 3) : std::string("    -")) << "\n";
  }
  const auto& last = report.energy_orders.back();
  s << "reference energy order min(k+1, s) - 1 = " << report.reference_order() << " (s unbounded for a smooth exact solution)\n";
  if (last) {
    s << "finest-pair energy order " << format_fixed(*last, 3)
      << (*last >= report.reference_order() - 0.2 ? " >= " : " < ") << format_fixed(report.reference_order() - 0.2, 1)
      << "\n";
  }
  return s.str();
}

}  // namespace dgair
