#include "pstokes/mesh.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace pstokes;

TEST_CASE("structured mesh combinatorics")
{
  CHECK_THROWS_AS(Mesh::structured(0), std::invalid_argument);
  const Mesh m1 = Mesh::structured(1);
  CHECK(m1.num_vertices() == 4);
  CHECK(m1.num_cells() == 2);
  CHECK(m1.patch(0) == std::vector<int>{0, 1});

  const Mesh m2 = Mesh::structured(2);
  CHECK(m2.num_vertices() == 9);
  CHECK(m2.num_cells() == 8);
  for (int c = 0; c < m2.num_cells(); ++c)
    CHECK(m2.patch(c).size() <= 13);
  CHECK_THROWS_AS(m2.patch(8), std::out_of_range);
}

TEST_CASE("mesh invariants for n up to 32")
{
  for (int n : {1, 2, 3, 4, 8, 16, 32}) {
    const Mesh m = Mesh::structured(n);
    CHECK(m.num_vertices() - static_cast<int>(m.edges().size()) + m.num_cells() == 1);

    double area = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
      area += m.area(c);
      CHECK(m.area(c) > 0);
      const auto& patch = m.patch(c);
      CHECK(std::find(patch.begin(), patch.end(), c) != patch.end());
      CHECK(patch.size() <= 13);
      double patch_area = 0.0;
      for (int t : patch)
        patch_area += m.area(t);
      CHECK(patch_area >= m.area(c));
      CHECK(patch_area <= 13 * m.area(c) * (1 + 1e-14));
    }
    CHECK(std::abs(area - 1.0) <= 1e-14);

    for (int v = 0; v < m.num_vertices(); ++v) {
      const Point& x = m.vertex(v);
      const bool on_edge = x.x() == 0 || x.x() == 1 || x.y() == 0 || x.y() == 1;
      CHECK(m.is_boundary(v) == on_edge);
      CHECK(x.minCoeff() >= 0);
      CHECK(x.maxCoeff() <= 1);
    }
  }
}

TEST_CASE("cell numbering of the structured mesh")
{
  // Square (i, j) holds cells 2 (i + j n) (below the diagonal) and +1.
  const int n = 4;
  const Mesh m = Mesh::structured(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < 2; ++k) {
        const Cell& c = m.cell(2 * (i + j * n) + k);
        Point centroid = (m.vertex(c[0]) + m.vertex(c[1]) + m.vertex(c[2])) / 3.0;
        CHECK(std::floor(centroid.x() * n) == i);
        CHECK(std::floor(centroid.y() * n) == j);
        const double dx = centroid.x() * n - i, dy = centroid.y() * n - j;
        CHECK((k == 0 ? dx >= dy : dx <= dy));
      }
}

TEST_CASE("shape metrics")
{
  const Mesh tri({Point(0, 0), Point(1, 0), Point(0, 1)}, {Cell{0, 1, 2}});
  const ShapeMetrics s = shape_metrics(tri);
  CHECK(s.h == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(tri.inscribed_diameter(0) == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(s.max_ratio == doctest::Approx(std::sqrt(2.0) / (2 - std::sqrt(2.0))).epsilon(1e-14));
  CHECK(s.max_ratio == doctest::Approx(1 + std::sqrt(2.0)).epsilon(1e-14));

  const ShapeMetrics m4 = shape_metrics(Mesh::structured(4));
  const ShapeMetrics m8 = shape_metrics(Mesh::structured(8));
  CHECK(m4.h == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-15));
  CHECK(m8.max_ratio == doctest::Approx(1 + std::sqrt(2.0)).epsilon(1e-13));
  CHECK(m4.max_ratio == doctest::Approx(m8.max_ratio).epsilon(1e-13));
  CHECK(m8.max_ratio <= kShapeRegularityBound);
  CHECK(m8.min_area == doctest::Approx(1.0 / 128).epsilon(1e-14));

  const Mesh big = Mesh::structured(4).scaled(3.7);
  CHECK(shape_metrics(big).max_ratio == doctest::Approx(m4.max_ratio).epsilon(1e-13));
  CHECK(shape_metrics(big).h == doctest::Approx(3.7 * m4.h).epsilon(1e-14));
}

TEST_CASE("mesh validation and dump")
{
  CHECK_THROWS_AS(Mesh({Point(0, 0), Point(1, 0), Point(0, 1)}, {Cell{0, 2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Mesh({Point(0, 0), Point(1, 0), Point(0, 1)}, {Cell{0, 1, 5}}), std::invalid_argument);
  std::ostringstream os;
  Mesh::structured(1).write(os);
  std::istringstream is(os.str());
  int v = 0, c = 0;
  is >> v >> c;
  CHECK(v == 4);
  CHECK(c == 2);
}
