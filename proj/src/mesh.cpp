#include "pstokes/mesh.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pstokes {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c)
{
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

}  // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<Cell> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells))
{
  const int nv = num_vertices();
  areas_.reserve(cells_.size());
  vertex_cells_.assign(nv, {});
  std::map<Edge, int> edge_count;

  for (int c = 0; c < num_cells(); ++c) {
    const Cell& cell = cells_[c];
    for (int v : cell)
      if (v < 0 || v >= nv)
        throw std::invalid_argument("Mesh: cell " + std::to_string(c) + " references an invalid vertex");
    const double a = signed_area(vertices_[cell[0]], vertices_[cell[1]], vertices_[cell[2]]);
    if (!(a > 0.0))
      throw std::invalid_argument("Mesh: cell " + std::to_string(c) + " is degenerate or negatively oriented");
    areas_.push_back(a);
    for (int k = 0; k < 3; ++k) {
      vertex_cells_[cell[k]].push_back(c);
      Edge e{cell[k], cell[(k + 1) % 3]};
      if (e[0] > e[1])
        std::swap(e[0], e[1]);
      ++edge_count[e];
    }
  }

  boundary_.assign(nv, false);
  edges_.reserve(edge_count.size());
  for (const auto& [edge, count] : edge_count) {
    if (count > 2)
      throw std::invalid_argument("Mesh: non-manifold edge");
    if (count == 1)
      boundary_[edge[0]] = boundary_[edge[1]] = true;
    edges_.push_back(edge);
  }

  patches_.resize(cells_.size());
  for (int c = 0; c < num_cells(); ++c) {
    std::vector<int>& patch = patches_[c];
    for (int v : cells_[c])
      patch.insert(patch.end(), vertex_cells_[v].begin(), vertex_cells_[v].end());
    std::sort(patch.begin(), patch.end());
    patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
  }
}

Mesh Mesh::structured(int n)
{
  if (n < 1)
    throw std::invalid_argument("Mesh::structured: n must be at least 1");
  std::vector<Point> vertices;
  vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);

  std::vector<Cell> cells;
  cells.reserve(2 * n * n);
  auto id = [n](int i, int j) { return i + j * (n + 1); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return Mesh(std::move(vertices), std::move(cells));
}

double Mesh::diameter(int c) const
{
  const Cell& t = cells_[c];
  double h = 0.0;
  for (int k = 0; k < 3; ++k)
    h = std::max(h, (vertices_[t[k]] - vertices_[t[(k + 1) % 3]]).norm());
  return h;
}

double Mesh::inscribed_diameter(int c) const
{
  const Cell& t = cells_[c];
  double perimeter = 0.0;
  for (int k = 0; k < 3; ++k)
    perimeter += (vertices_[t[k]] - vertices_[t[(k + 1) % 3]]).norm();
  // inradius r = 2|T| / perimeter
  return 4.0 * areas_[c] / perimeter;
}

const std::vector<int>& Mesh::patch(int c) const
{
  if (c < 0 || c >= num_cells())
    throw std::out_of_range("Mesh::patch: cell index " + std::to_string(c) + " out of range");
  return patches_[c];
}

Mesh Mesh::scaled(double factor) const
{
  std::vector<Point> v = vertices_;
  for (Point& x : v)
    x *= factor;
  return Mesh(std::move(v), cells_);
}

void Mesh::write(std::ostream& os) const
{
  os << num_vertices() << ' ' << num_cells() << '\n';
  os.precision(17);
  for (const Point& x : vertices_)
    os << x.x() << ' ' << x.y() << '\n';
  for (const Cell& t : cells_)
    os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

ShapeMetrics shape_metrics(const Mesh& mesh)
{
  ShapeMetrics m;
  m.min_area = mesh.num_cells() > 0 ? mesh.area(0) : 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double h = mesh.diameter(c);
    m.h = std::max(m.h, h);
    m.max_ratio = std::max(m.max_ratio, h / mesh.inscribed_diameter(c));
    m.min_area = std::min(m.min_area, mesh.area(c));
  }
  return m;
}

}  // namespace pstokes
