#pragma once

// Parabolic problems on boxes with Dirichlet data, collocation sets, residuals
// and the three-term collocation loss.
//
// Points are laid out as (x[, y], t).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qpinn/model.hpp"

namespace qpinn {

using PointFn = std::function<double(std::span<const double>)>;

// u_t - coeff * laplacian(u) = source on domain x (0, t_max],
// u = bc_value on the boundary, u(., 0) = initial.
struct PdeProblem {
    std::string name;
    unsigned spatial_dim{1};
    std::vector<Interval> domain;
    double t_max{1.0};
    double coeff{1.0};
    PointFn source;
    PointFn bc_value;
    PointFn initial;    // evaluated at (x[, y], 0)
    PointFn reference;  // empty when no reference solution is known

    std::size_t input_dim() const { return spatial_dim + 1; }
    Box input_box() const;
    void validate() const;
};

// u_t = (0.01/pi) u_xx on [-1, 1] x [0, 0.95], u0 = sin(pi x), zero Dirichlet.
PdeProblem heat1d();
// u_t = (2/pi)(u_xx + u_yy) on [-1, 1]^2 x [0, 0.1], u0 = exp(-10 (x^2 + y^2));
// Dirichlet data is the free-space solution's boundary trace.
PdeProblem heat2d();
// "heat1d" | "heat2d"; throws std::invalid_argument otherwise.
PdeProblem problem_by_name(const std::string& name);

// Flat list of points of a fixed dimension.
struct PointSet {
    std::size_t dim{0};
    std::vector<double> coords;

    std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
    bool empty() const { return coords.empty(); }
    std::span<const double> operator[](std::size_t i) const { return {coords.data() + i * dim, dim}; }
    void push(std::span<const double> p) { coords.insert(coords.end(), p.begin(), p.end()); }
    friend bool operator==(const PointSet&, const PointSet&) = default;
};

struct GridSpec {
    std::vector<std::size_t> spatial;  // nodes per spatial axis
    std::size_t nt{2};
    double subsample{1.0};             // fraction of interior points kept (seeded)
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct CollocationSet {
    PointSet interior;
    PointSet boundary;
    std::vector<int> boundary_face;  // 0: x=lo, 1: x=hi, 2: y=lo, 3: y=hi
    PointSet initial;
    GridSpec grid;
    std::uint64_t seed{0};
    double inset{0.0};
    friend bool operator==(const CollocationSet&, const CollocationSet&) = default;
};

// Tensor grid over space x time. Interior points are the grid clamped inward by
// `inset` on every axis (time included) so stencils of that width stay in the
// domain. Boundary points: spatial faces x the clamped time grid. Initial
// points: the full spatial grid at t = 0.
CollocationSet make_collocation(const PdeProblem& problem, const GridSpec& grid, double inset,
                                std::uint64_t seed = 0);

// Spatial nodes only (dim = spatial_dim), endpoints included, x-major.
PointSet spatial_grid(const PdeProblem& problem, const std::vector<std::size_t>& nodes);

// Full unclamped grid (spatial nodes x linspace(0, t_max, nt)).
PointSet tensor_grid(const PdeProblem& problem, const GridSpec& grid);

double residual_pde(const PdeProblem& problem, const Evaluator& u, std::span<const double> point,
                    double h, bool check_domain = true);

struct LossWeights {
    double lambda_bc{1.0};
    double lambda_ic{1.0};
};

struct LossBreakdown {
    double total{0.0};
    double pde_term{0.0};
    double bc_term{0.0};
    double ic_term{0.0};
    double lambda_bc{1.0};
    double lambda_ic{1.0};
};

// Mean-squared residual per set, total = pde + lambda_bc * bc + lambda_ic * ic.
LossBreakdown loss(const PdeProblem& problem, const Evaluator& u, const CollocationSet& points,
                   LossWeights weights, double h);

LossBreakdown loss(const PdeProblem& problem, const ModelConfig& config, const ModelParams& params,
                   const CollocationSet& points, LossWeights weights);

struct LossAndGradient {
    LossBreakdown loss;
    ModelGrad grad;
};

// Loss and its exact gradient through the compiled observable. Partial sums are
// formed over fixed-size chunks and reduced in chunk order, so the result does
// not depend on `threads` (0 = hardware concurrency).
LossAndGradient loss_and_gradient(const PdeProblem& problem, const ModelConfig& config,
                                  const ModelParams& params, const CollocationSet& points,
                                  LossWeights weights, unsigned threads = 1);

ModelGrad loss_gradient(const PdeProblem& problem, const ModelConfig& config,
                        const ModelParams& params, const CollocationSet& points,
                        LossWeights weights, unsigned threads = 1);

// Same quantity by chaining grad_params over every stencil point. Slow; used as
// the cross-check for the compiled route.
LossAndGradient loss_gradient_pointwise(const PdeProblem& problem, const ModelConfig& config,
                                        const ModelParams& params, const CollocationSet& points,
                                        LossWeights weights);

// Model values at every point through the compiled observable.
std::vector<double> predict(const ModelConfig& config, const ModelParams& params,
                            const PointSet& points, unsigned threads = 1);

}  // namespace qpinn
