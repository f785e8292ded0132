#pragma once

#include <string>
#include <utility>
#include <vector>

#include "contopt/mesh.hpp"

namespace contopt {

// Legacy ASCII writer for a triangle mesh plus its boundary facets as line
// cells. Point arrays have one entry per mesh vertex; cell arrays one entry
// per triangle followed by one per facet.
class VtkMeshWriter {
 public:
  explicit VtkMeshWriter(const TriMesh& mesh) : mesh_(mesh) {}

  void add_point_vectors(const std::string& name, std::vector<Vec2> values);
  void add_point_scalars(const std::string& name, std::vector<double> values);
  void add_cell_scalars(const std::string& name, std::vector<double> values);
  void write(const std::string& path, const std::string& title = "contopt mesh") const;

 private:
  const TriMesh& mesh_;
  std::vector<std::pair<std::string, std::vector<Vec2>>> point_vectors_;
  std::vector<std::pair<std::string, std::vector<double>>> point_scalars_;
  std::vector<std::pair<std::string, std::vector<double>>> cell_scalars_;
};

// STRUCTURED_POINTS dataset; values[j * nx + i].
void write_vtk_grid(const std::string& path, int nx, int ny, double x0, double y0, double dx, double dy,
                    const std::vector<std::pair<std::string, const std::vector<double>*>>& fields);

}  // namespace contopt
