#include "qpinn/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "parallel.hpp"
#include "qpinn/compiled_model.hpp"
#include "qpinn/oracle.hpp"
#include "qpinn/simd/kernels.hpp"

namespace qpinn {

Box PdeProblem::input_box() const {
    Box box = domain;
    box.push_back({0.0, t_max});
    return box;
}

void PdeProblem::validate() const {
    if (spatial_dim != 1 && spatial_dim != 2) throw std::invalid_argument("spatial_dim must be 1 or 2");
    if (domain.size() != spatial_dim) throw std::invalid_argument("domain rank != spatial_dim");
    for (const auto& iv : domain) {
        if (!(iv.lo < iv.hi)) throw std::invalid_argument("degenerate domain axis");
    }
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
    if (!(coeff > 0.0)) throw std::invalid_argument("diffusion coefficient must be positive");
    if (!bc_value || !initial) throw std::invalid_argument("problem lacks boundary or initial data");
}

PdeProblem heat1d() {
    PdeProblem p;
    p.name = "heat1d";
    p.spatial_dim = 1;
    p.domain = {{-1.0, 1.0}};
    p.t_max = 0.95;
    p.coeff = kHeat1dAlpha;
    p.source = [](std::span<const double>) { return 0.0; };
    p.bc_value = [](std::span<const double>) { return 0.0; };
    p.initial = [](std::span<const double> x) { return std::sin(std::numbers::pi * x[0]); };
    p.reference = [](std::span<const double> x) { return exact_heat1d(x[0], x[1]); };
    return p;
}

PdeProblem heat2d() {
    PdeProblem p;
    p.name = "heat2d";
    p.spatial_dim = 2;
    p.domain = {{-1.0, 1.0}, {-1.0, 1.0}};
    p.t_max = 0.1;
    p.coeff = kHeat2dKappa;
    p.source = [](std::span<const double>) { return 0.0; };
    p.bc_value = [](std::span<const double> x) { return exact_heat2d_freespace(x[0], x[1], x[2]); };
    p.initial = [](std::span<const double> x) { return std::exp(-10.0 * (x[0] * x[0] + x[1] * x[1])); };
    p.reference = [](std::span<const double> x) { return exact_heat2d_freespace(x[0], x[1], x[2]); };
    return p;
}

PdeProblem problem_by_name(const std::string& name) {
    if (name == "heat1d") return heat1d();
    if (name == "heat2d") return heat2d();
    throw std::invalid_argument("unknown problem '" + name + "' (expected heat1d or heat2d)");
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = 0.5 * (lo + hi);
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

std::vector<double> clamp_inward(std::vector<double> v, double lo, double hi, double inset) {
    for (auto& x : v) x = std::clamp(x, lo + inset, hi - inset);
    return v;
}

void check_grid(const PdeProblem& problem, const GridSpec& grid) {
    if (grid.spatial.size() != problem.spatial_dim) {
        throw std::invalid_argument("grid rank " + std::to_string(grid.spatial.size()) +
                                    " != spatial dim " + std::to_string(problem.spatial_dim));
    }
    for (auto n : grid.spatial) {
        if (n < 2) throw std::invalid_argument("need at least 2 nodes per spatial axis");
    }
    if (grid.nt < 2) throw std::invalid_argument("need at least 2 time nodes");
    if (!(grid.subsample > 0.0 && grid.subsample <= 1.0)) {
        throw std::invalid_argument("subsample fraction must lie in (0, 1]");
    }
}

}  // namespace

PointSet spatial_grid(const PdeProblem& problem, const std::vector<std::size_t>& nodes) {
    if (nodes.size() != problem.spatial_dim) throw std::invalid_argument("spatial grid rank mismatch");
    for (auto n : nodes) {
        if (n < 2) throw std::invalid_argument("need at least 2 nodes per spatial axis");
    }
    PointSet out{problem.spatial_dim, {}};
    const auto xs = linspace(problem.domain[0].lo, problem.domain[0].hi, nodes[0]);
    if (problem.spatial_dim == 1) {
        for (double x : xs) out.push(std::vector<double>{x});
        return out;
    }
    const auto ys = linspace(problem.domain[1].lo, problem.domain[1].hi, nodes[1]);
    for (double x : xs) {
        for (double y : ys) out.push(std::vector<double>{x, y});
    }
    return out;
}

PointSet tensor_grid(const PdeProblem& problem, const GridSpec& grid) {
    check_grid(problem, grid);
    const auto xs = linspace(problem.domain[0].lo, problem.domain[0].hi, grid.spatial[0]);
    const auto ts = linspace(0.0, problem.t_max, grid.nt);
    PointSet out{problem.input_dim(), {}};
    if (problem.spatial_dim == 1) {
        for (double x : xs) {
            for (double t : ts) out.push(std::vector<double>{x, t});
        }
        return out;
    }
    const auto ys = linspace(problem.domain[1].lo, problem.domain[1].hi, grid.spatial[1]);
    for (double x : xs) {
        for (double y : ys) {
            for (double t : ts) out.push(std::vector<double>{x, y, t});
        }
    }
    return out;
}

CollocationSet make_collocation(const PdeProblem& problem, const GridSpec& grid, double inset,
                                std::uint64_t seed) {
    problem.validate();
    check_grid(problem, grid);
    if (!(inset >= 0.0)) throw std::invalid_argument("inset must be non-negative");

    // Clamping may not reorder nodes: spacing must exceed twice the inset.
    auto check_spacing = [&](double lo, double hi, std::size_t n, const char* axis) {
        const double spacing = (hi - lo) / static_cast<double>(n - 1);
        if (spacing <= 2.0 * inset) {
            throw std::invalid_argument(std::string("grid too fine on ") + axis + " axis: spacing " +
                                        std::to_string(spacing) + " <= 2 x inset " +
                                        std::to_string(inset));
        }
    };
    const char* names[] = {"x", "y"};
    for (std::size_t a = 0; a < problem.spatial_dim; ++a) {
        check_spacing(problem.domain[a].lo, problem.domain[a].hi, grid.spatial[a], names[a]);
    }
    check_spacing(0.0, problem.t_max, grid.nt, "t");

    CollocationSet set;
    set.grid = grid;
    set.seed = seed;
    set.inset = inset;
    const std::size_t d = problem.input_dim();
    set.interior.dim = set.boundary.dim = set.initial.dim = d;

    std::vector<std::vector<double>> axes;
    for (std::size_t a = 0; a < problem.spatial_dim; ++a) {
        axes.push_back(linspace(problem.domain[a].lo, problem.domain[a].hi, grid.spatial[a]));
    }
    const auto t_raw = linspace(0.0, problem.t_max, grid.nt);
    const auto t_in = clamp_inward(t_raw, 0.0, problem.t_max, inset);

    std::vector<std::vector<double>> axes_in;
    for (std::size_t a = 0; a < problem.spatial_dim; ++a) {
        axes_in.push_back(clamp_inward(axes[a], problem.domain[a].lo, problem.domain[a].hi, inset));
    }

    std::vector<double> p(d);
    if (problem.spatial_dim == 1) {
        for (double x : axes_in[0]) {
            for (double t : t_in) {
                p = {x, t};
                set.interior.push(p);
            }
        }
        for (int face = 0; face < 2; ++face) {
            const double x = face == 0 ? problem.domain[0].lo : problem.domain[0].hi;
            for (double t : t_in) {
                p = {x, t};
                set.boundary.push(p);
                set.boundary_face.push_back(face);
            }
        }
        for (double x : axes[0]) {
            p = {x, 0.0};
            set.initial.push(p);
        }
    } else {
        for (double x : axes_in[0]) {
            for (double y : axes_in[1]) {
                for (double t : t_in) {
                    p = {x, y, t};
                    set.interior.push(p);
                }
            }
        }
        // Perimeter nodes, each once: the x faces take the corners.
        const std::size_t nx = axes[0].size();
        const std::size_t ny = axes[1].size();
        std::vector<std::pair<std::size_t, std::size_t>> perim;
        std::vector<int> faces;
        for (std::size_t j = 0; j < ny; ++j) {
            perim.emplace_back(0, j);
            faces.push_back(0);
        }
        for (std::size_t j = 0; j < ny; ++j) {
            perim.emplace_back(nx - 1, j);
            faces.push_back(1);
        }
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            perim.emplace_back(i, 0);
            faces.push_back(2);
        }
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            perim.emplace_back(i, ny - 1);
            faces.push_back(3);
        }
        for (double t : t_in) {
            for (std::size_t k = 0; k < perim.size(); ++k) {
                p = {axes[0][perim[k].first], axes[1][perim[k].second], t};
                set.boundary.push(p);
                set.boundary_face.push_back(faces[k]);
            }
        }
        for (double x : axes[0]) {
            for (double y : axes[1]) {
                p = {x, y, 0.0};
                set.initial.push(p);
            }
        }
    }

    if (grid.subsample < 1.0) {
        const std::size_t n = set.interior.size();
        const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(grid.subsample * n)));
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::mt19937_64 rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(keep);
        std::sort(idx.begin(), idx.end());
        PointSet kept{d, {}};
        for (auto i : idx) kept.push(set.interior[i]);
        set.interior = std::move(kept);
    }
    return set;
}

double residual_pde(const PdeProblem& problem, const Evaluator& u, std::span<const double> point,
                    double h, bool check_domain) {
    const Box box = problem.input_box();
    const Box* dom = check_domain ? &box : nullptr;
    const std::size_t t_axis = problem.spatial_dim;
    const double u_t = input_derivative(u, point, {t_axis, 1}, h, dom);
    double lap = 0.0;
    for (std::size_t a = 0; a < problem.spatial_dim; ++a) {
        lap += input_derivative(u, point, {a, 2}, h, dom);
    }
    const double q = problem.source ? problem.source(point) : 0.0;
    return u_t - problem.coeff * lap - q;
}

namespace {

LossBreakdown combine(double pde_sum, std::size_t n_pde, double bc_sum, std::size_t n_bc,
                      double ic_sum, std::size_t n_ic, LossWeights w) {
    LossBreakdown out;
    out.pde_term = pde_sum / static_cast<double>(n_pde);
    out.bc_term = bc_sum / static_cast<double>(n_bc);
    out.ic_term = ic_sum / static_cast<double>(n_ic);
    out.lambda_bc = w.lambda_bc;
    out.lambda_ic = w.lambda_ic;
    out.total = out.pde_term + w.lambda_bc * out.bc_term + w.lambda_ic * out.ic_term;
    return out;
}

void require_points(const CollocationSet& points) {
    if (points.interior.empty() || points.boundary.empty() || points.initial.empty()) {
        throw std::invalid_argument("collocation sets must all be non-empty");
    }
}

// Stencil layout for an interior point: center, then (+h, -h) per spatial axis,
// then (+h, -h) in time.
std::size_t stencil_size(std::size_t spatial_dim) { return 3 + 2 * spatial_dim; }

void fill_stencil(std::span<const double> point, std::size_t spatial_dim, double h,
                  std::vector<double>& out) {
    const std::size_t d = point.size();
    const std::size_t m = stencil_size(spatial_dim);
    out.assign(m * d, 0.0);
    for (std::size_t j = 0; j < m; ++j) std::copy(point.begin(), point.end(), out.begin() + j * d);
    for (std::size_t a = 0; a <= spatial_dim; ++a) {
        const double x0 = point[a];
        out[(1 + 2 * a) * d + a] = x0 + h;
        out[(2 + 2 * a) * d + a] = x0 - h;
    }
}

// Residual from stencil values, same arithmetic as residual_pde. Writes
// d residual / d value_j into `coef`.
double stencil_residual(std::span<const double> vals, std::size_t spatial_dim, double h, double coeff,
                        double source, std::span<double> coef) {
    const std::size_t t = spatial_dim;
    const double u_t = (vals[1 + 2 * t] - vals[2 + 2 * t]) / (2.0 * h);
    double lap = 0.0;
    for (std::size_t a = 0; a < spatial_dim; ++a) {
        lap += (vals[1 + 2 * a] - 2.0 * vals[0] + vals[2 + 2 * a]) / (h * h);
    }
    const double inv_h2 = 1.0 / (h * h);
    coef[0] = 2.0 * static_cast<double>(spatial_dim) * coeff * inv_h2;
    for (std::size_t a = 0; a < spatial_dim; ++a) {
        coef[1 + 2 * a] = -coeff * inv_h2;
        coef[2 + 2 * a] = -coeff * inv_h2;
    }
    coef[1 + 2 * t] = 1.0 / (2.0 * h);
    coef[2 + 2 * t] = -1.0 / (2.0 * h);
    return u_t - coeff * lap - source;
}

constexpr std::size_t kChunk = 256;

struct Partial {
    double pde{0.0}, bc{0.0}, ic{0.0};
    double g_scale{0.0}, g_bias{0.0};
    std::vector<double> r;
    EmbeddingParams g_xi;
};

// Per-thread scratch for the compiled path.
struct Workspace {
    std::size_t dim, n;
    std::vector<double> psi, m_psi, scratch, dangle, upstream;
    std::vector<double> batch_x, batch_w;
    std::size_t batch_count{0};

    Workspace(std::size_t d, std::size_t q, std::size_t max_batch)
        : dim(d), n(q), psi(d), m_psi(d), scratch(2 * d), dangle(q), upstream(q),
          batch_x(max_batch * d), batch_w(max_batch) {}
};

constexpr std::size_t kBatch = 16;

struct PointEval {
    EmbedOutput emb;
    std::vector<double> psi;
    std::vector<double> m_psi;
    double raw{0.0};
};

void eval_point(const CompiledObservable& obs, const ModelParams& params, std::span<const double> p,
                PointEval& out) {
    embed_forward_into(params.xi, p, out.emb);
    out.psi.resize(obs.dim());
    out.m_psi.resize(obs.dim());
    encoding_state(out.emb.angles, out.psi);
    out.raw = obs.value(out.psi, out.m_psi);
}

void flush(Workspace& ws, Partial& part) {
    if (ws.batch_count == 0) return;
    simd::kernels().rank_update(part.r.data(), ws.batch_x.data(), ws.batch_w.data(), ws.batch_count, ws.dim);
    ws.batch_count = 0;
}

// Back-propagates dL/du = w at one evaluated point.
void backprop_point(const CompiledObservable& obs, const ModelParams& params, const PointEval& pe,
                    double w, bool train_map, Workspace& ws, Partial& part) {
    if (train_map) {
        part.g_scale += w * pe.raw;
        part.g_bias += w;
    }
    const double a = w * params.scale;
    if (ws.batch_count == kBatch) flush(ws, part);
    std::copy(pe.psi.begin(), pe.psi.end(), ws.batch_x.begin() + ws.batch_count * ws.dim);
    ws.batch_w[ws.batch_count++] = a;

    encoding_backward(pe.emb.angles, pe.m_psi, ws.dangle, ws.scratch);
    for (std::size_t q = 0; q < ws.n; ++q) ws.upstream[q] = 2.0 * a * ws.dangle[q];
    embed_backward_accumulate(params.xi, pe.emb, ws.upstream, part.g_xi);
}

}  // namespace

LossBreakdown loss(const PdeProblem& problem, const Evaluator& u, const CollocationSet& points,
                   LossWeights weights, double h) {
    require_points(points);
    double pde = 0.0, bc = 0.0, ic = 0.0;
    for (std::size_t i = 0; i < points.interior.size(); ++i) {
        const double r = residual_pde(problem, u, points.interior[i], h);
        pde += r * r;
    }
    for (std::size_t i = 0; i < points.boundary.size(); ++i) {
        const auto p = points.boundary[i];
        const double r = u(p) - problem.bc_value(p);
        bc += r * r;
    }
    for (std::size_t i = 0; i < points.initial.size(); ++i) {
        const auto p = points.initial[i];
        const double r = u(p) - problem.initial(p);
        ic += r * r;
    }
    return combine(pde, points.interior.size(), bc, points.boundary.size(), ic, points.initial.size(),
                   weights);
}

LossBreakdown loss(const PdeProblem& problem, const ModelConfig& config, const ModelParams& params,
                   const CollocationSet& points, LossWeights weights) {
    const Evaluator u = [&](std::span<const double> p) { return forward(config, params, p); };
    return loss(problem, u, points, weights, config.fd_step);
}

LossAndGradient loss_and_gradient(const PdeProblem& problem, const ModelConfig& config,
                                  const ModelParams& params, const CollocationSet& points,
                                  LossWeights weights, unsigned threads) {
    config.validate();
    require_points(points);
    const CompiledObservable obs(config, params.theta);
    const std::size_t dim = obs.dim();
    const std::size_t n_pde = points.interior.size();
    const std::size_t n_bc = points.boundary.size();
    const std::size_t n_ic = points.initial.size();
    const std::size_t c_pde = (n_pde + kChunk - 1) / kChunk;
    const std::size_t c_bc = (n_bc + kChunk - 1) / kChunk;
    const std::size_t c_ic = (n_ic + kChunk - 1) / kChunk;
    const std::size_t n_chunks = c_pde + c_bc + c_ic;
    const double h = config.fd_step;
    const std::size_t sdim = problem.spatial_dim;
    const std::size_t m = stencil_size(sdim);
    const Box box = problem.input_box();

    std::vector<Partial> parts(n_chunks);
    detail::parallel_for(n_chunks, threads, [&](std::size_t c) {
        Partial& part = parts[c];
        part.r.assign(dim * dim, 0.0);
        part.g_xi = EmbeddingParams::zeros(config.embedding_dims);
        Workspace ws(dim, obs.n_qubits(), kBatch);
        std::vector<PointEval> evals(m);
        std::vector<double> stencil, vals(m), coef(m);

        if (c < c_pde) {
            const std::size_t end = std::min(n_pde, (c + 1) * kChunk);
            const double scale = 2.0 / static_cast<double>(n_pde);
            for (std::size_t i = c * kChunk; i < end; ++i) {
                const auto p = points.interior[i];
                for (std::size_t a = 0; a <= sdim; ++a) {
                    if (p[a] - h < box[a].lo - 1e-12 || p[a] + h > box[a].hi + 1e-12) {
                        throw DomainError("interior point stencil leaves the domain on axis " +
                                          std::to_string(a));
                    }
                }
                fill_stencil(p, sdim, h, stencil);
                for (std::size_t j = 0; j < m; ++j) {
                    eval_point(obs, params, {stencil.data() + j * p.size(), p.size()}, evals[j]);
                    vals[j] = params.scale * evals[j].raw + params.bias;
                }
                const double q = problem.source ? problem.source(p) : 0.0;
                const double r = stencil_residual(vals, sdim, h, problem.coeff, q, coef);
                part.pde += r * r;
                for (std::size_t j = 0; j < m; ++j) {
                    backprop_point(obs, params, evals[j], scale * r * coef[j], config.train_output_map,
                                   ws, part);
                }
            }
        } else {
            const bool is_bc = c < c_pde + c_bc;
            const PointSet& set = is_bc ? points.boundary : points.initial;
            const std::size_t first = (c - (is_bc ? c_pde : c_pde + c_bc)) * kChunk;
            const std::size_t end = std::min(set.size(), first + kChunk);
            const double lambda = is_bc ? weights.lambda_bc : weights.lambda_ic;
            const double scale = lambda * 2.0 / static_cast<double>(set.size());
            const PointFn& target = is_bc ? problem.bc_value : problem.initial;
            for (std::size_t i = first; i < end; ++i) {
                const auto p = set[i];
                eval_point(obs, params, p, evals[0]);
                const double r = params.scale * evals[0].raw + params.bias - target(p);
                (is_bc ? part.bc : part.ic) += r * r;
                backprop_point(obs, params, evals[0], scale * r, config.train_output_map, ws, part);
            }
        }
        flush(ws, part);
    });

    double pde = 0.0, bc = 0.0, ic = 0.0;
    std::vector<double> r(dim * dim, 0.0);
    ModelGrad grad = ModelGrad::zeros(config);
    for (const Partial& part : parts) {
        pde += part.pde;
        bc += part.bc;
        ic += part.ic;
        for (std::size_t k = 0; k < r.size(); ++k) r[k] += part.r[k];
        ModelGrad tmp;
        tmp.d_theta.assign(grad.d_theta.size(), 0.0);
        tmp.d_xi = part.g_xi;
        tmp.d_outmap = {part.g_scale, part.g_bias};
        grad.axpy(1.0, tmp);
    }
    grad.d_theta = obs.theta_gradient(r);

    LossAndGradient out;
    out.loss = combine(pde, n_pde, bc, n_bc, ic, n_ic, weights);
    out.grad = std::move(grad);
    return out;
}

ModelGrad loss_gradient(const PdeProblem& problem, const ModelConfig& config,
                        const ModelParams& params, const CollocationSet& points,
                        LossWeights weights, unsigned threads) {
    return loss_and_gradient(problem, config, params, points, weights, threads).grad;
}

LossAndGradient loss_gradient_pointwise(const PdeProblem& problem, const ModelConfig& config,
                                        const ModelParams& params, const CollocationSet& points,
                                        LossWeights weights) {
    require_points(points);
    const double h = config.fd_step;
    const std::size_t sdim = problem.spatial_dim;
    const std::size_t m = stencil_size(sdim);
    ModelGrad grad = ModelGrad::zeros(config);
    double pde = 0.0, bc = 0.0, ic = 0.0;
    std::vector<double> stencil, vals(m), coef(m);

    const double s_pde = 2.0 / static_cast<double>(points.interior.size());
    for (std::size_t i = 0; i < points.interior.size(); ++i) {
        const auto p = points.interior[i];
        fill_stencil(p, sdim, h, stencil);
        for (std::size_t j = 0; j < m; ++j) {
            vals[j] = forward(config, params, {stencil.data() + j * p.size(), p.size()});
        }
        const double q = problem.source ? problem.source(p) : 0.0;
        const double r = stencil_residual(vals, sdim, h, problem.coeff, q, coef);
        pde += r * r;
        for (std::size_t j = 0; j < m; ++j) {
            grad.axpy(s_pde * r * coef[j], grad_params(config, params, {stencil.data() + j * p.size(), p.size()}));
        }
    }
    auto dirichlet = [&](const PointSet& set, const PointFn& target, double lambda, double& acc) {
        const double s = lambda * 2.0 / static_cast<double>(set.size());
        for (std::size_t i = 0; i < set.size(); ++i) {
            const auto p = set[i];
            const double r = forward(config, params, p) - target(p);
            acc += r * r;
            grad.axpy(s * r, grad_params(config, params, p));
        }
    };
    dirichlet(points.boundary, problem.bc_value, weights.lambda_bc, bc);
    dirichlet(points.initial, problem.initial, weights.lambda_ic, ic);
    if (!config.train_output_map) grad.d_outmap = {0.0, 0.0};

    LossAndGradient out;
    out.loss = combine(pde, points.interior.size(), bc, points.boundary.size(), ic,
                       points.initial.size(), weights);
    out.grad = std::move(grad);
    return out;
}

std::vector<double> predict(const ModelConfig& config, const ModelParams& params,
                            const PointSet& points, unsigned threads) {
    const CompiledObservable obs(config, params.theta);
    std::vector<double> out(points.size());
    const std::size_t n_chunks = (points.size() + kChunk - 1) / kChunk;
    detail::parallel_for(n_chunks, threads, [&](std::size_t c) {
        PointEval pe;
        const std::size_t end = std::min(points.size(), (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            eval_point(obs, params, points[i], pe);
            out[i] = params.scale * pe.raw + params.bias;
        }
    });
    return out;
}

}  // namespace qpinn
