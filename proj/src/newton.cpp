#include "pstokes/newton.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pstokes {

namespace {

int find_offset(const SparseMatrix& a, int row, int col)
{
  const int* inner = a.innerIndexPtr();
  const int* first = inner + a.outerIndexPtr()[col];
  const int* last = inner + a.outerIndexPtr()[col + 1];
  const int* it = std::lower_bound(first, last, row);
  if (it == last || *it != row)
    throw std::logic_error("SaddleSolver: entry outside the reduced pattern");
  return static_cast<int>(it - inner);
}

}  // namespace

SaddleSolver::SaddleSolver(const FeSystem& sys)
    : sys_(sys), nu_(sys.num_free_velocity_dofs()), np_(sys.num_pressure_dofs())
{
  const Mesh& mesh = sys.mesh();
  const int nv = mesh.num_vertices();
  const int nc = mesh.num_cells();

  std::vector<int> reduced(nu_, -1);
  for (int i = 0; i < nu_; ++i)
    if (sys.full_index(i) < 2 * nv) {
      reduced[i] = static_cast<int>(nodal_free_.size());
      nodal_free_.push_back(i);
    }
  nodal_ = static_cast<int>(nodal_free_.size());
  auto pressure_index = [&](int vertex) { return vertex == 0 ? -1 : nodal_ + vertex - 1; };

  const SparseMatrix& b = sys.divergence();
  cell_nodal_.resize(nc);
  cell_bubble_.resize(nc);
  bubble_divergence_.resize(nc);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(81 * nc);
  std::vector<std::array<int, 9>> local(nc);
  for (int c = 0; c < nc; ++c) {
    const auto dofs = sys.cell_dofs(c);
    const Cell& t = mesh.cell(c);
    for (int i = 0; i < 6; ++i) {
      const int f = sys.free_index(dofs[i]);
      cell_nodal_[c][i] = f >= 0 ? reduced[f] : -1;
      local[c][i] = cell_nodal_[c][i];
    }
    for (int k = 0; k < 3; ++k)
      local[c][6 + k] = pressure_index(t[k]);
    for (int a = 0; a < 2; ++a) {
      cell_bubble_[c][a] = sys.free_index(dofs[6 + a]);
      for (int k = 0; k < 3; ++k)
        bubble_divergence_[c](k, a) = b.coeff(t[k], cell_bubble_[c][a]);
    }
    for (int i : local[c])
      for (int j : local[c])
        if (i >= 0 && j >= 0)
          trip.emplace_back(i, j, 0.0);
  }
  const int n = nodal_ + np_ - 1;
  kkt_.resize(n, n);
  kkt_.setFromTriplets(trip.begin(), trip.end());
  kkt_.makeCompressed();

  offsets_.resize(nc);
  for (int c = 0; c < nc; ++c)
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        const int row = local[c][i];
        const int col = local[c][j];
        offsets_[c][9 * i + j] = row >= 0 && col >= 0 ? find_offset(kkt_, row, col) : -1;
      }

  const SparseMatrix& pattern = sys.velocity_pattern();
  for (int col = 0; col < pattern.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(pattern, col); it; ++it)
      if (reduced[it.row()] >= 0 && reduced[col] >= 0)
        h_copy_.emplace_back(static_cast<int>(&it.value() - pattern.valuePtr()),
                             find_offset(kkt_, reduced[it.row()], reduced[col]));
  for (int col = 0; col < b.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(b, col); it; ++it)
      if (it.row() > 0 && reduced[col] >= 0) {
        const int p = pressure_index(static_cast<int>(it.row()));
        b_values_.emplace_back(find_offset(kkt_, p, reduced[col]), -it.value());
        b_values_.emplace_back(find_offset(kkt_, reduced[col], p), -it.value());
      }

  w_inv_.resize(nc);
  h_nb_.resize(nc);
  lu_.analyzePattern(kkt_);
}

void SaddleSolver::factorize(const SparseMatrix& h)
{
  if (h.nonZeros() != sys_.velocity_pattern().nonZeros())
    throw std::invalid_argument("SaddleSolver: H is not in the velocity pattern");
  Eigen::Map<Vector> values(kkt_.valuePtr(), kkt_.nonZeros());
  values.setZero();
  const double* hv = h.valuePtr();
  for (const auto& [from, to] : h_copy_)
    values[to] = hv[from];
  for (const auto& [to, v] : b_values_)
    values[to] += v;

  // Condense the bubbles: with W = H_bb, subtract
  //   [ H_nb ] W^-1 [ H_bn  -B_b^T ]
  //   [ -B_b ]
  // from the nodal/pressure block of each cell.
  for (int c = 0; c < sys_.mesh().num_cells(); ++c) {
    const auto& off = sys_.cell_offsets(c);
    Eigen::Matrix2d w;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        w(a, b) = hv[off[8 * (6 + a) + 6 + b]];
    Eigen::Matrix<double, 6, 2> h_nb;
    for (int i = 0; i < 6; ++i)
      for (int a = 0; a < 2; ++a)
        h_nb(i, a) = off[8 * i + 6 + a] >= 0 ? hv[off[8 * i + 6 + a]] : 0.0;
    const double det = w.determinant();
    if (!(std::abs(det) > 0.0) || !std::isfinite(det))
      throw SingularSystem("SaddleSolver: singular bubble block in cell " + std::to_string(c));
    w_inv_[c] = w.inverse();
    h_nb_[c] = h_nb;

    Eigen::Matrix<double, 9, 2> side;
    side.topRows<6>() = h_nb;
    side.bottomRows<3>() = -bubble_divergence_[c];
    const Eigen::Matrix<double, 9, 9> correction = side * w_inv_[c] * side.transpose();
    const LocalOffsets& to = offsets_[c];
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        if (to[9 * i + j] >= 0)
          values[to[9 * i + j]] -= correction(i, j);
  }

  lu_.factorize(kkt_);
  if (lu_.info() != Eigen::Success)
    throw SingularSystem("SaddleSolver: factorization failed: " + lu_.lastErrorMessage());
}

SaddleSolver::Solution SaddleSolver::solve(const Vector& f, const Vector& g)
{
  const Mesh& mesh = sys_.mesh();
  Vector rhs(nodal_ + np_ - 1);
  for (int r = 0; r < nodal_; ++r)
    rhs[r] = f[nodal_free_[r]];
  rhs.tail(np_ - 1) = g.tail(np_ - 1);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::Vector2d y = w_inv_[c] * Eigen::Vector2d(f[cell_bubble_[c][0]], f[cell_bubble_[c][1]]);
    const Eigen::Matrix<double, 6, 1> dn = h_nb_[c] * y;
    for (int i = 0; i < 6; ++i)
      if (cell_nodal_[c][i] >= 0)
        rhs[cell_nodal_[c][i]] -= dn[i];
    const Eigen::Vector3d dp = bubble_divergence_[c] * y;
    const Cell& t = mesh.cell(c);
    for (int k = 0; k < 3; ++k)
      if (t[k] > 0)
        rhs[nodal_ + t[k] - 1] += dp[k];
  }

  const Vector x = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success || !x.allFinite())
    throw SingularSystem("SaddleSolver: solve failed");

  Solution out;
  out.velocity = Vector::Zero(nu_);
  for (int r = 0; r < nodal_; ++r)
    out.velocity[nodal_free_[r]] = x[r];
  out.pressure.resize(np_);
  out.pressure[0] = 0.0;
  out.pressure.tail(np_ - 1) = x.tail(np_ - 1);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Eigen::Matrix<double, 6, 1> dn;
    for (int i = 0; i < 6; ++i)
      dn[i] = cell_nodal_[c][i] >= 0 ? x[cell_nodal_[c][i]] : 0.0;
    const Cell& t = mesh.cell(c);
    const Eigen::Vector3d q(out.pressure[t[0]], out.pressure[t[1]], out.pressure[t[2]]);
    const Eigen::Vector2d fb(f[cell_bubble_[c][0]], f[cell_bubble_[c][1]]);
    const Eigen::Vector2d db =
        w_inv_[c] * (fb - h_nb_[c].transpose() * dn + bubble_divergence_[c].transpose() * q);
    out.velocity[cell_bubble_[c][0]] = db[0];
    out.velocity[cell_bubble_[c][1]] = db[1];
  }
  out.pressure.array() -= sys_.pressure_mean_weights().dot(out.pressure) / sys_.pressure_mean_weights().sum();
  return out;
}

NewtonResult newton_solve(const EnergyOracle& oracle, SaddleSolver& solver, const SparseMatrix& divergence,
                          Vector init, Vector pressure_init, double load_norm, const NewtonOptions& opts)
{
  NewtonResult result;
  result.velocity = std::move(init);
  result.pressure = std::move(pressure_init);
  const double threshold = opts.tol * (1.0 + load_norm);

  double energy = oracle.energy(result.velocity);
  result.energies.push_back(energy);
  for (int iter = 0;; ++iter) {
    const Vector grad = oracle.gradient(result.velocity);
    const Vector constraint = divergence * result.velocity;
    result.residual = std::max((grad - divergence.transpose() * result.pressure).norm(), constraint.norm());
    result.iterations = iter;
    if (result.residual <= threshold)
      return result;
    if (iter == opts.max_iterations)
      throw NewtonFailure("Newton: no convergence after " + std::to_string(iter) +
                              " iterations, residual " + std::to_string(result.residual),
                          iter, result.residual);

    solver.factorize(oracle.hessian(result.velocity));
    const auto [direction, pressure] = solver.solve(-grad, constraint);
    const double slope = grad.dot(direction);

    double alpha = 1.0;
    Vector trial = result.velocity + direction;
    double trial_energy = oracle.energy(trial);
    // In the round-off regime energy differences carry no information;
    // take the full Newton step.
    const bool roundoff = -slope <= 1e-13 * std::abs(energy);
    if (slope < 0.0 && !roundoff) {
      int backtracks = 0;
      while (!(trial_energy <= energy + opts.armijo * alpha * slope)) {
        if (++backtracks > opts.max_backtracks)
          throw NewtonFailure("Newton: line search failed, residual " + std::to_string(result.residual), iter,
                              result.residual);
        alpha *= opts.backtrack;
        trial = result.velocity + alpha * direction;
        trial_energy = oracle.energy(trial);
      }
    }
    result.velocity = std::move(trial);
    result.pressure = pressure;
    energy = trial_energy;
    result.energies.push_back(energy);
  }
}

}  // namespace pstokes
