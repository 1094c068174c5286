#ifndef PSTOKES_MESH_HPP
#define PSTOKES_MESH_HPP

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <vector>

namespace pstokes {

using Point = Eigen::Vector2d;
using Cell = std::array<int, 3>;
using Edge = std::array<int, 2>;

/// Upper bound on max h_T / rho_T accepted for a mesh family.
inline constexpr double kShapeRegularityBound = 3.0;

struct ShapeMetrics {
  double h = 0.0;          ///< max cell diameter
  double max_ratio = 0.0;  ///< max h_T / rho_T, rho_T the inscribed-circle diameter
  double min_area = 0.0;
};

/// Immutable conforming triangulation.
///
/// Cells are stored positively oriented. Boundary vertices are the endpoints
/// of edges that belong to exactly one cell.
class Mesh {
public:
  /// Validates orientation and positive area; builds all incidence data.
  Mesh(std::vector<Point> vertices, std::vector<Cell> cells);

  /// n x n squares of the unit square, each split along the (0,0)-(1,1) diagonal.
  static Mesh structured(int n);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const Point& vertex(int v) const { return vertices_[v]; }
  const Cell& cell(int c) const { return cells_[c]; }

  bool is_boundary(int v) const { return boundary_[v]; }
  const std::vector<int>& vertex_cells(int v) const { return vertex_cells_[v]; }

  /// Unique edges, each with increasing vertex indices, sorted.
  const std::vector<Edge>& edges() const { return edges_; }

  double area(int c) const { return areas_[c]; }
  double diameter(int c) const;
  double inscribed_diameter(int c) const;

  /// Cells sharing at least one vertex with `c`, including `c`, sorted.
  const std::vector<int>& patch(int c) const;

  Mesh scaled(double factor) const;

  /// Plain text: `V C`, then V lines `x y`, then C lines `i j k`.
  void write(std::ostream& os) const;

private:
  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<double> areas_;
  std::vector<bool> boundary_;
  std::vector<std::vector<int>> vertex_cells_;
  std::vector<std::vector<int>> patches_;
  std::vector<Edge> edges_;
};

ShapeMetrics shape_metrics(const Mesh& mesh);

}  // namespace pstokes

#endif
