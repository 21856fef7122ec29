#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "smallscat/errors.hpp"
#include "smallscat/geometry.hpp"
#include "smallscat/incident.hpp"
#include "smallscat/parallel.hpp"
#include "smallscat/spherical_harmonics.hpp"

namespace smallscat {

/// Resolution of the rotated polar rule used for the weakly singular static kernel.
struct SingularQuadratureOptions {
  int extra_theta = 4;
  int extra_phi = 8;
  int workers = 1;
};

/// Dense Nyström matrix of the single-layer trace operator at one complex frequency.
struct SingleLayerMatrix {
  Eigen::MatrixXcd values;
  cd s;
  double epsilon = 1.0;
};

/// Frequency-independent Nyström data of the single-layer operator on one surface grid.
///
/// The kernel is split as e^{-sr}/(4 pi r) = cosh(sr)/(4 pi r) - sinh(sr)/(4 pi r). The second
/// term is an entire function of r^2 and is sampled with the plain product weights. The first is
/// (1/(4 pi r)) times a smooth factor; it uses the corrected static matrix Q, which maps node
/// values g_j to int g(y) / (4 pi |x_i - y|) dGamma_y. Each row of Q comes from a product rule
/// in polar coordinates centred on x_i (the area element cancels the 1/r singularity) applied to
/// the spherical-harmonic hyperinterpolant of the node values.
class SingleLayerKernel {
 public:
  explicit SingleLayerKernel(SurfaceGrid grid, const SingularQuadratureOptions& opts = {})
      : grid_(std::make_shared<const SurfaceGrid>(std::move(grid))) {
    build_distances();
    build_static(opts);
  }

  /// Kernel data for the same shape and resolution dilated to scale `epsilon`.
  SingleLayerKernel rescaled(double epsilon) const {
    SingleLayerKernel out;
    out.grid_ = std::make_shared<const SurfaceGrid>(build_surface_grid(
        grid_->shape, epsilon, grid_->resolution.n_theta, grid_->resolution.n_phi));
    const double factor = epsilon / grid_->epsilon;
    out.static_ = std::make_shared<const Eigen::MatrixXd>(factor * *static_);
    out.distances_ = std::make_shared<const Eigen::MatrixXd>(factor * *distances_);
    return out;
  }

  const SurfaceGrid& grid() const { return *grid_; }
  const Eigen::MatrixXd& static_matrix() const { return *static_; }
  const Eigen::MatrixXd& distances() const { return *distances_; }

  SingleLayerMatrix assemble(cd s) const {
    const auto n = static_cast<Eigen::Index>(grid_->size());
    const auto& q = *static_;
    const auto& d = *distances_;
    SingleLayerMatrix out;
    out.s = s;
    out.epsilon = grid_->epsilon;
    out.values.resize(n, n);
    const double inv4pi = 0.25 / std::numbers::pi;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double wj = grid_->weights[static_cast<size_t>(j)] * inv4pi;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double r = d(i, j);
        const cd z = s * r;
        cd cosh_part;
        cd sinh_over_r;
        if (std::abs(z) < 1e-2) {
          const cd z2 = z * z;
          cosh_part = 1.0 + z2 / 2.0 * (1.0 + z2 / 12.0 * (1.0 + z2 / 30.0));
          sinh_over_r = s * (1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0)));
        } else {
          const cd e = std::exp(z);
          const cd einv = 1.0 / e;
          cosh_part = 0.5 * (e + einv);
          sinh_over_r = 0.5 * (e - einv) / r;
        }
        out.values(i, j) = q(i, j) * cosh_part - wj * sinh_over_r;
      }
    }
    return out;
  }

 private:
  SingleLayerKernel() = default;

  void build_distances() {
    const auto& g = *grid_;
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd d(n, n);
    const double tiny = 1e-12 * g.epsilon;
    for (Eigen::Index i = 0; i < n; ++i) {
      d(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double r = (g.nodes[static_cast<size_t>(i)] - g.nodes[static_cast<size_t>(j)]).norm();
        if (!(r > tiny)) throw GridError("coincident distinct surface nodes");
        d(i, j) = r;
        d(j, i) = r;
      }
    }
    distances_ = std::make_shared<const Eigen::MatrixXd>(std::move(d));
  }

  void build_static(const SingularQuadratureOptions& opts) {
    const auto& g = *grid_;
    const int nt = g.resolution.n_theta;
    const int np = g.resolution.n_phi;
    const int degree = std::max(0, std::min(nt - 1, (np - 1) / 2));
    const RealSphericalHarmonics basis(degree);
    const int k = basis.count();
    const auto n = static_cast<Eigen::Index>(g.size());

    Eigen::MatrixXd y_nodes(n, k);
    {
      std::vector<double> scratch;
      std::vector<double> row(static_cast<size_t>(k));
      for (Eigen::Index j = 0; j < n; ++j) {
        const Vec3& dir = g.directions[static_cast<size_t>(j)];
        basis.evaluate(dir.x(), dir.y(), dir.z(), row, scratch);
        for (int c = 0; c < k; ++c) y_nodes(j, c) = row[static_cast<size_t>(c)];
      }
    }

    // Rotated polar rule: Gauss–Legendre in theta' on [0, pi] (measure d theta'), trapezoid in phi'.
    const int rt = nt + opts.extra_theta;
    const int rp = np + opts.extra_phi;
    const auto& gl = gauss_legendre(rt);
    std::vector<double> st(static_cast<size_t>(rt));
    std::vector<double> ct(static_cast<size_t>(rt));
    std::vector<double> wt(static_cast<size_t>(rt));
    for (int a = 0; a < rt; ++a) {
      const double theta = 0.5 * std::numbers::pi * (1.0 + gl.nodes[static_cast<size_t>(a)]);
      st[static_cast<size_t>(a)] = std::sin(theta);
      ct[static_cast<size_t>(a)] = std::cos(theta);
      wt[static_cast<size_t>(a)] = 0.5 * std::numbers::pi * gl.weights[static_cast<size_t>(a)] *
                                   (2.0 * std::numbers::pi / rp) * std::sin(theta);
    }
    std::vector<double> cp(static_cast<size_t>(rp));
    std::vector<double> sp(static_cast<size_t>(rp));
    for (int b = 0; b < rp; ++b) {
      const double phi = 2.0 * std::numbers::pi * (b + 0.5) / rp;
      cp[static_cast<size_t>(b)] = std::cos(phi);
      sp[static_cast<size_t>(b)] = std::sin(phi);
    }

    const double eps = g.epsilon;
    const double inv4pi = 0.25 / std::numbers::pi;
    Eigen::MatrixXd projected(n, k);
    parallel_for(static_cast<size_t>(n), opts.workers, [&](size_t i) {
      const Vec3& xi = g.nodes[i];
      const Vec3& d = g.directions[i];
      Vec3 e1;
      Vec3 e2;
      complete_frame(d, e1, e2);
      std::vector<double> acc(static_cast<size_t>(k), 0.0);
      std::vector<double> scratch;
      for (int a = 0; a < rt; ++a) {
        for (int b = 0; b < rp; ++b) {
          const Vec3 dir = st[static_cast<size_t>(a)] * (cp[static_cast<size_t>(b)] * e1 + sp[static_cast<size_t>(b)] * e2) +
                           ct[static_cast<size_t>(a)] * d;
          const auto p = surface_point(g.shape, dir);
          const Vec3 y = eps * p.x;
          const double jac = eps * eps * p.jacobian;
          const double kappa = wt[static_cast<size_t>(a)] * jac * inv4pi / (xi - y).norm();
          basis.accumulate(dir.x(), dir.y(), dir.z(), kappa, acc, scratch);
        }
      }
      for (int c = 0; c < k; ++c) projected(static_cast<Eigen::Index>(i), c) = acc[static_cast<size_t>(c)];
    });

    // The projection onto degree <= L harmonics has rank (L+1)^2 < n. Components outside it are
    // small for smooth densities and go through a plain rule with a disc self-term instead.
    Eigen::MatrixXd ytw = y_nodes.transpose();
    for (Eigen::Index j = 0; j < n; ++j) ytw.col(j) *= g.sphere_weights[static_cast<size_t>(j)];
    Eigen::MatrixXd plain(n, n);
    const auto& d = *distances_;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double wj = g.weights[static_cast<size_t>(j)];
      for (Eigen::Index i = 0; i < n; ++i) plain(i, j) = i == j ? 0.5 * std::sqrt(wj / std::numbers::pi) : wj * inv4pi / d(i, j);
    }
    Eigen::MatrixXd q = plain;
    q.noalias() += (projected - plain * y_nodes) * ytw;
    static_ = std::make_shared<const Eigen::MatrixXd>(std::move(q));
  }

  std::shared_ptr<const SurfaceGrid> grid_;
  std::shared_ptr<const Eigen::MatrixXd> static_;
  std::shared_ptr<const Eigen::MatrixXd> distances_;
};

inline SingleLayerMatrix assemble_single_layer(const SurfaceGrid& grid, cd s) {
  return SingleLayerKernel(grid).assemble(s);
}

struct DensitySolve {
  BoundaryDensity density;
  double condition_estimate = 1.0;
  double relative_residual = 0.0;
};

/// Dense LU solve with residual verification.
inline DensitySolve solve_density(const SingleLayerMatrix& mat, const BoundaryDensity& rhs,
                                  double residual_tolerance = 1e-10) {
  if (mat.values.rows() != static_cast<Eigen::Index>(rhs.size()))
    throw GridError("density length does not match the matrix");
  DensitySolve out;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(mat.values);
  const double rcond = lu.rcond();
  out.condition_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  const double rhs_norm = rhs.values.norm();
  if (rhs_norm == 0.0) {
    out.density.values = Eigen::VectorXcd::Zero(rhs.values.size());
    return out;
  }
  if (!(rcond > 0.0)) throw SolverError(mat.s, out.condition_estimate, "single-layer factorization broke down");
  out.density.values = lu.solve(rhs.values);
  out.relative_residual = (mat.values * out.density.values - rhs.values).norm() / rhs_norm;
  if (!std::isfinite(out.relative_residual) || out.relative_residual > residual_tolerance)
    throw SolverError(mat.s, out.condition_estimate, "single-layer solve failed its residual check");
  return out;
}

struct CapacitanceResult {
  double c1 = 0.0;
  BoundaryDensity sigma1;
  GridResolution resolution;
};

/// Equilibrium density of the unit-scale surface and its total charge c^1.
/// At s = 0 the matrix is the real static matrix, so a real factorization suffices.
inline CapacitanceResult capacitance(const SingleLayerKernel& unit_kernel) {
  const auto& g = unit_kernel.grid();
  const auto& q = unit_kernel.static_matrix();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(q.rows());
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(q);
  const double rcond = lu.rcond();
  const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(rcond > 0.0)) throw SolverError(0.0, cond, "static single-layer factorization broke down");
  const Eigen::VectorXd sigma = lu.solve(ones);
  const double residual = (q * sigma - ones).norm() / ones.norm();
  if (!(residual <= 1e-10)) throw SolverError(0.0, cond, "equilibrium density failed its residual check");
  CapacitanceResult out;
  out.resolution = g.resolution;
  out.sigma1.values = sigma.cast<cd>();
  for (size_t j = 0; j < g.size(); ++j) out.c1 += g.weights[j] * sigma[static_cast<Eigen::Index>(j)];
  return out;
}

inline CapacitanceResult capacitance(const StarShape& shape, const GridResolution& res,
                                     const SingularQuadratureOptions& opts = {}) {
  return capacitance(SingleLayerKernel(build_surface_grid(shape, 1.0, res.n_theta, res.n_phi), opts));
}

/// Single-layer potential int e^{-s|x-y|}/(4 pi |x-y|) phi(y) dGamma_y at off-surface points.
inline std::vector<cd> evaluate_potential(const SurfaceGrid& grid, const BoundaryDensity& density, cd s,
                                          const std::vector<Vec3>& points) {
  if (density.size() != grid.size()) throw GridError("density length does not match the grid");
  const double min_distance = 2.0 * grid.mesh_width;
  const double inv4pi = 0.25 / std::numbers::pi;
  std::vector<cd> out(points.size());
  for (size_t k = 0; k < points.size(); ++k) {
    cd acc = 0.0;
    double nearest = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < grid.size(); ++j) {
      const double r = (points[k] - grid.nodes[j]).norm();
      nearest = std::min(nearest, r);
      acc += grid.weights[j] * density.values[static_cast<Eigen::Index>(j)] * std::exp(-s * r) / r;
    }
    if (nearest < min_distance) throw EvaluationError("evaluation point too close to the surface");
    out[k] = acc * inv4pi;
  }
  return out;
}

/// Solution of the exterior Dirichlet problem, represented by its single-layer density.
struct ExteriorField {
  std::shared_ptr<const SurfaceGrid> grid;
  cd s;
  BoundaryDensity density;
  double condition_estimate = 1.0;

  std::vector<cd> operator()(const std::vector<Vec3>& points) const {
    return evaluate_potential(*grid, density, s, points);
  }
};

inline ExteriorField exterior_dirichlet(const SingleLayerKernel& kernel, cd s, const BoundaryDensity& data) {
  auto solved = solve_density(kernel.assemble(s), data);
  ExteriorField f;
  f.grid = std::make_shared<const SurfaceGrid>(kernel.grid());
  f.s = s;
  f.density = std::move(solved.density);
  f.condition_estimate = solved.condition_estimate;
  return f;
}

inline ExteriorField exterior_dirichlet(const SingleLayerKernel& kernel, cd s,
                                        const std::function<cd(const Vec3&)>& data) {
  BoundaryDensity g;
  g.values.resize(static_cast<Eigen::Index>(kernel.grid().size()));
  for (size_t j = 0; j < kernel.grid().size(); ++j) g.values[static_cast<Eigen::Index>(j)] = data(kernel.grid().nodes[j]);
  return exterior_dirichlet(kernel, s, g);
}

struct ScatteredSolve {
  std::vector<cd> values;
  BoundaryDensity density;
  double condition_estimate = 1.0;
};

/// Laplace-domain scattered field: lambda = S(s)^{-1}(-trace u^inc), u_sc = S(s) lambda.
inline ScatteredSolve scattered_frequency_solve(const SingleLayerKernel& kernel, const ShellPulse& pulse, cd s,
                                                const std::vector<Vec3>& points) {
  auto g = incident_trace(pulse, s, kernel.grid());
  g.values = -g.values;
  auto solved = solve_density(kernel.assemble(s), g);
  ScatteredSolve out;
  out.values = evaluate_potential(kernel.grid(), solved.density, s, points);
  out.density = std::move(solved.density);
  out.condition_estimate = solved.condition_estimate;
  return out;
}

inline std::vector<cd> scattered_frequency(const SingleLayerKernel& kernel, const ShellPulse& pulse, cd s,
                                           const std::vector<Vec3>& points) {
  return scattered_frequency_solve(kernel, pulse, s, points).values;
}

inline std::vector<cd> scattered_frequency(const StarShape& shape, double eps, const ShellPulse& pulse, cd s,
                                           const std::vector<Vec3>& points, const GridResolution& res = {}) {
  const SingleLayerKernel unit(build_surface_grid(shape, 1.0, res.n_theta, res.n_phi));
  return scattered_frequency(unit.rescaled(eps), pulse, s, points);
}

struct ProjectionSplit {
  cd mean;
  BoundaryDensity fluctuation;
};

/// L^2(Gamma)-orthogonal split into constants and their weighted-mean-free complement.
inline ProjectionSplit boundary_projections(const SurfaceGrid& grid, const BoundaryDensity& density) {
  if (density.size() != grid.size()) throw GridError("density length does not match the grid");
  cd num = 0.0;
  double den = 0.0;
  for (size_t j = 0; j < grid.size(); ++j) {
    num += grid.weights[j] * density.values[static_cast<Eigen::Index>(j)];
    den += grid.weights[j];
  }
  ProjectionSplit out;
  out.mean = num / den;
  out.fluctuation.values = density.values.array() - out.mean;
  return out;
}

/// Discrete L^2(Gamma) norm.
inline double surface_l2_norm(const SurfaceGrid& grid, const BoundaryDensity& density) {
  double acc = 0.0;
  for (size_t j = 0; j < grid.size(); ++j) acc += grid.weights[j] * std::norm(density.values[static_cast<Eigen::Index>(j)]);
  return std::sqrt(acc);
}

}  // namespace smallscat
