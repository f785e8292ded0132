#include "contopt/vtk_writer.hpp"

#include <fstream>

namespace contopt {

void VtkMeshWriter::add_point_vectors(const std::string& name, std::vector<Vec2> values) {
  if (values.size() != mesh_.vertices.size()) throw ConfigError("VTK point array '" + name + "' has wrong size");
  point_vectors_.emplace_back(name, std::move(values));
}

void VtkMeshWriter::add_point_scalars(const std::string& name, std::vector<double> values) {
  if (values.size() != mesh_.vertices.size()) throw ConfigError("VTK point array '" + name + "' has wrong size");
  point_scalars_.emplace_back(name, std::move(values));
}

void VtkMeshWriter::add_cell_scalars(const std::string& name, std::vector<double> values) {
  if (values.size() != mesh_.triangles.size() + mesh_.facets.size()) {
    throw ConfigError("VTK cell array '" + name + "' has wrong size");
  }
  cell_scalars_.emplace_back(name, std::move(values));
}

void VtkMeshWriter::write(const std::string& path, const std::string& title) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out.precision(12);
  const size_t nt = mesh_.triangles.size(), nf = mesh_.facets.size();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh_.vertices.size() << " double\n";
  for (const auto& p : mesh_.vertices) out << p.x() << ' ' << p.y() << " 0\n";
  out << "CELLS " << nt + nf << ' ' << 4 * nt + 3 * nf << '\n';
  for (const auto& t : mesh_.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& f : mesh_.facets) out << "2 " << f.v[0] << ' ' << f.v[1] << '\n';
  out << "CELL_TYPES " << nt + nf << '\n';
  for (size_t i = 0; i < nt; ++i) out << "5\n";
  for (size_t i = 0; i < nf; ++i) out << "3\n";

  out << "CELL_DATA " << nt + nf << '\n';
  out << "SCALARS boundary_label int 1\nLOOKUP_TABLE default\n";
  for (size_t i = 0; i < nt; ++i) out << "-1\n";
  for (const auto& f : mesh_.facets) out << static_cast<int>(f.label) << '\n';
  for (const auto& [name, vals] : cell_scalars_) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : vals) out << v << '\n';
  }
  if (!point_vectors_.empty() || !point_scalars_.empty()) {
    out << "POINT_DATA " << mesh_.vertices.size() << '\n';
    for (const auto& [name, vals] : point_vectors_) {
      out << "VECTORS " << name << " double\n";
      for (const auto& v : vals) out << v.x() << ' ' << v.y() << " 0\n";
    }
    for (const auto& [name, vals] : point_scalars_) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : vals) out << v << '\n';
    }
  }
}

void write_vtk_grid(const std::string& path, int nx, int ny, double x0, double y0, double dx, double dy,
                    const std::vector<std::pair<std::string, const std::vector<double>*>>& fields) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out.precision(12);
  out << "# vtk DataFile Version 3.0\nlevel set grid\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << nx << ' ' << ny << " 1\n";
  out << "ORIGIN " << x0 << ' ' << y0 << " 0\n";
  out << "SPACING " << dx << ' ' << dy << " 1\n";
  out << "POINT_DATA " << static_cast<long>(nx) * ny << '\n';
  for (const auto& [name, vals] : fields) {
    if (!vals || vals->size() != static_cast<size_t>(nx) * ny) {
      throw ConfigError("grid field '" + name + "' has wrong size");
    }
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : *vals) out << v << '\n';
  }
}

}  // namespace contopt
