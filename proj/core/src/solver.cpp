#include "voxquad/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "voxquad/error.hpp"

namespace voxquad {

namespace {

double dot_product(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot_product(a, a)); }

class ResidualTracker {
 public:
  ResidualTracker(const SparseOperator& a, std::span<const double> b)
      : a_(a), b_(b), scale_(norm2(b) > 0.0 ? norm2(b) : 1.0), work_(b.size()) {}

  double relative_residual(std::span<const double> x) {
    a_.multiply(x, work_);
    double s = 0.0;
    for (std::size_t i = 0; i < b_.size(); ++i) {
      const double r = b_[i] - work_[i];
      s += r * r;
    }
    return std::sqrt(s) / scale_;
  }

  double offer(std::span<const double> x) {
    const double r = relative_residual(x);
    if (r < best_residual_) {
      best_residual_ = r;
      best_.assign(x.begin(), x.end());
    }
    return r;
  }

  double best_residual() const { return best_residual_; }
  const std::vector<double>& best() const { return best_; }
  double scale() const { return scale_; }

 private:
  const SparseOperator& a_;
  std::span<const double> b_;
  double scale_;
  std::vector<double> work_;
  double best_residual_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_;
};

// Returns the number of iterations used; x is updated in place.
std::size_t bicgstab(const SparseOperator& a, std::span<const double> b, std::vector<double>& x,
                     std::span<const double> inv_diag, double tol, std::size_t max_iter,
                     ResidualTracker& tracker) {
  const std::size_t n = b.size();
  std::vector<double> r(n), r_hat(n), p(n, 0.0), v(n, 0.0), y(n), s(n), z(n), t(n);
  a.multiply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  r_hat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  const double target = tol * tracker.scale();
  std::size_t restarts = 0;
  std::size_t it = 0;
  while (it < max_iter) {
    ++it;
    const double rho_new = dot_product(r_hat, r);
    if (rho_new == 0.0 || !std::isfinite(rho_new)) {
      if (++restarts > 5) break;
      r_hat = r;
      rho = alpha = omega = 1.0;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    for (std::size_t i = 0; i < n; ++i) y[i] = inv_diag[i] * p[i];
    a.multiply(y, v);
    const double denom = dot_product(r_hat, v);
    if (denom == 0.0 || !std::isfinite(denom)) break;
    alpha = rho / denom;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) <= target) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * y[i];
      if (tracker.offer(x) <= tol) return it;
      a.multiply(x, r);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * s[i];
    a.multiply(z, t);
    const double tt = dot_product(t, t);
    if (tt == 0.0) break;
    omega = dot_product(t, s) / tt;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * y[i] + omega * z[i];
      r[i] = s[i] - omega * t[i];
    }
    if (norm2(r) <= target) {
      // Guard against drift between the recursive and the true residual.
      if (tracker.offer(x) <= tol) return it;
      a.multiply(x, r);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    }
    if (omega == 0.0) break;
  }
  tracker.offer(x);
  return it;
}

bool dense_solve(const SparseOperator& a, std::span<const double> b, std::vector<double>& x) {
  const auto n = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (const Triplet& t : a.triplets()) {
    dense(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) = t.value;
  }
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
  const Eigen::VectorXd sol = dense.partialPivLu().solve(rhs);
  if (!sol.allFinite()) return false;
  x.assign(sol.data(), sol.data() + n);
  return true;
}

std::size_t gauss_seidel(const SparseOperator& a, std::span<const double> b, std::vector<double>& x,
                         double tol, std::size_t max_iter, ResidualTracker& tracker) {
  const auto offsets = a.row_offsets();
  const auto cols = a.column_indices();
  const auto vals = a.values();
  const std::vector<double> diag = a.diagonal_values();
  for (std::size_t it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (diag[i] == 0.0) return it;
      double s = b[i];
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        if (cols[k] != i) s -= vals[k] * x[cols[k]];
      }
      x[i] = s / diag[i];
    }
    if (it % 10 == 0 || it == max_iter) {
      if (tracker.offer(x) <= tol) return it;
    }
  }
  return max_iter;
}

}  // namespace

std::string to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::Krylov:
      return "krylov";
    case SolveMethod::Dense:
      return "dense";
    case SolveMethod::Stationary:
      return "stationary";
  }
  return "unknown";
}

std::vector<double> solve(const LinearSystem& system, const SolveOptions& options,
                          SolveReport* report) {
  const SparseOperator& a = system.matrix;
  const std::span<const double> b = system.rhs;
  if (!(options.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (a.rows() != a.cols() || a.rows() != b.size()) throw InvalidArgument("system dimension mismatch");
  const std::size_t n = b.size();
  SolveReport local;
  SolveReport& rep = report ? *report : local;
  rep = SolveReport{};
  std::vector<double> x(n, 0.0);
  if (n == 0) return x;

  ResidualTracker tracker(a, b);
  if (tracker.offer(x) <= options.tol && norm2(b) == 0.0) return x;

  const std::size_t max_iter = options.max_iter > 0 ? options.max_iter : 10 * n;
  std::vector<double> inv_diag = a.diagonal_values();
  for (double& d : inv_diag) d = d != 0.0 ? 1.0 / d : 1.0;

  rep.method = SolveMethod::Krylov;
  rep.iterations = bicgstab(a, b, x, inv_diag, options.tol, max_iter, tracker);
  if (tracker.best_residual() <= options.tol) {
    rep.residual = tracker.best_residual();
    return tracker.best();
  }

  if (n <= options.dense_limit) {
    std::vector<double> xd;
    if (dense_solve(a, b, xd) && tracker.offer(xd) <= options.tol) {
      rep.method = SolveMethod::Dense;
      rep.iterations = 1;
      rep.residual = tracker.best_residual();
      return tracker.best();
    }
  }

  x = tracker.best();
  rep.method = SolveMethod::Stationary;
  rep.iterations = gauss_seidel(a, b, x, options.tol, max_iter, tracker);
  rep.residual = tracker.best_residual();
  if (tracker.best_residual() <= options.tol) return tracker.best();
  throw ConvergenceError("linear solver did not converge (best relative residual " +
                             std::to_string(tracker.best_residual()) + ")",
                         tracker.best_residual());
}

FeField solve_field(const SimplicialMesh& mesh, const LinearSystem& system,
                    const SolveOptions& options, SolveReport* report,
                    std::span<const double> fixed) {
  if (!fixed.empty() && fixed.size() != mesh.num_nodes()) {
    throw InvalidArgument("fixed values must cover every node");
  }
  const std::vector<double> x = solve(system, options, report);
  FeField field{&mesh, std::vector<double>(mesh.num_nodes(), 0.0)};
  if (!fixed.empty()) field.values.assign(fixed.begin(), fixed.end());
  for (std::size_t k = 0; k < system.free_nodes.size(); ++k) field.values[system.free_nodes[k]] = x[k];
  return field;
}

double discrete_l2_norm(const DualMesh& dual, std::span<const double> values) {
  if (values.size() != dual.num_nodes()) throw InvalidArgument("length mismatch in discrete norm");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += dual.voxel_measure(i) * values[i] * values[i];
  return std::sqrt(s);
}

double discrete_l2_relative_error(const DualMesh& dual, std::span<const double> approx,
                                  std::span<const double> reference) {
  if (approx.size() != dual.num_nodes() || reference.size() != dual.num_nodes()) {
    throw InvalidArgument("length mismatch in discrete norm");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    const double d = approx[i] - reference[i];
    num += dual.voxel_measure(i) * d * d;
    den += dual.voxel_measure(i) * reference[i] * reference[i];
  }
  if (!(den > 0.0)) throw InvalidArgument("reference norm is zero");
  return std::sqrt(num / den);
}

double h1_seminorm_diff(const SparseOperator& stiffness, std::span<const double> u,
                        std::span<const double> v) {
  if (u.size() != v.size() || u.size() != stiffness.cols()) {
    throw InvalidArgument("dimension mismatch in H1 seminorm");
  }
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d[i] = u[i] - v[i];
  const std::vector<double> sd = stiffness.multiply(d);
  return std::sqrt(std::max(0.0, dot_product(d, sd)));
}

FeField interpolate(const SimplicialMesh& mesh, const ScalarField& f) {
  FeField field{&mesh, std::vector<double>(mesh.num_nodes())};
  for (Index i = 0; i < mesh.num_nodes(); ++i) field.values[i] = f(mesh.node(i));
  return field;
}

double evaluate(const FeField& field, Point x) {
  if (!field.mesh) throw InvalidArgument("field has no mesh");
  const SimplicialMesh& mesh = *field.mesh;
  if (field.values.size() != mesh.num_nodes()) throw InvalidArgument("field length does not match mesh");
  constexpr double kSlack = 1e-12;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto idx = mesh.element(e);
    if (mesh.dim() == 1) {
      const double a = mesh.node(idx[0]).x;
      const double b = mesh.node(idx[1]).x;
      const double lo = std::min(a, b), hi = std::max(a, b);
      const double tol = kSlack * (hi - lo);
      if (x.x < lo - tol || x.x > hi + tol) continue;
      const double t = std::clamp((x.x - a) / (b - a), 0.0, 1.0);
      return (1.0 - t) * field.values[idx[0]] + t * field.values[idx[1]];
    }
    const Point a = mesh.node(idx[0]), b = mesh.node(idx[1]), c = mesh.node(idx[2]);
    const auto l = barycentric(a, b, c, x);
    if (l[0] < -kSlack || l[1] < -kSlack || l[2] < -kSlack) continue;
    return l[0] * field.values[idx[0]] + l[1] * field.values[idx[1]] + l[2] * field.values[idx[2]];
  }
  throw InvalidArgument("point outside the mesh");
}

}  // namespace voxquad
