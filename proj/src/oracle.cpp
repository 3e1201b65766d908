#include "qpinn/oracle.hpp"

#include <cmath>
#include <sstream>

namespace qpinn {

double exact_heat1d(double x, double t, double alpha) {
    constexpr double pi = std::numbers::pi;
    return std::sin(pi * x) * std::exp(-alpha * pi * pi * t);
}

double exact_heat2d_freespace(double x, double y, double t, double kappa) {
    const double spread = 1.0 + 40.0 * kappa * t;
    return std::exp(-10.0 * (x * x + y * y) / spread) / spread;
}

double FdSolution::coord(std::size_t axis, std::size_t i) const {
    const Interval& iv = domain[axis];
    return iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / static_cast<double>(nodes[axis] - 1);
}

std::size_t FdSolution::node_count() const {
    std::size_t n = 1;
    for (auto k : nodes) n *= k;
    return n;
}

std::vector<double> FdSolution::position(std::size_t i) const {
    if (nodes.size() == 1) return {coord(0, i)};
    return {coord(0, i / nodes[1]), coord(1, i % nodes[1])};
}

double fd_stable_dt(const PdeProblem& problem, const std::vector<std::size_t>& nodes) {
    double inv = 0.0;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        const double dx = (problem.domain[a].hi - problem.domain[a].lo) / static_cast<double>(nodes[a] - 1);
        inv += 1.0 / (dx * dx);
    }
    return 0.5 / (problem.coeff * inv);
}

FdSolution solve_fd(const PdeProblem& problem, const std::vector<std::size_t>& nodes, double dt,
                    const std::vector<double>& times, FdOptions options) {
    problem.validate();
    if (nodes.size() != problem.spatial_dim) throw std::invalid_argument("FD grid rank != spatial dim");
    for (auto n : nodes) {
        if (n < 3) throw std::invalid_argument("FD grid needs at least 3 nodes per axis");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1])) {
            throw std::invalid_argument("snapshot times must be non-negative and strictly increasing");
        }
    }
    const double dt_max = fd_stable_dt(problem, nodes);
    if (!(dt > 0.0) || dt > dt_max * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "FTCS step dt=" << dt << " violates the stability bound dt <= " << dt_max;
        throw StabilityError(msg.str(), dt_max);
    }

    FdSolution sol;
    sol.nodes = nodes;
    sol.domain = problem.domain;
    sol.dt = dt;
    sol.times = times;

    const std::size_t total = sol.node_count();
    const bool two_d = nodes.size() == 2;
    const std::size_t nx = nodes[0];
    const std::size_t ny = two_d ? nodes[1] : 1;
    auto on_boundary = [&](std::size_t i) {
        const std::size_t ix = i / ny;
        const std::size_t iy = i % ny;
        return ix == 0 || ix == nx - 1 || (two_d && (iy == 0 || iy == ny - 1));
    };

    std::vector<std::vector<double>> pos(total);
    for (std::size_t i = 0; i < total; ++i) pos[i] = sol.position(i);

    std::vector<double> u(total), next(total);
    std::vector<double> p(problem.input_dim());
    auto at = [&](std::size_t i, double t) -> std::span<const double> {
        std::copy(pos[i].begin(), pos[i].end(), p.begin());
        p.back() = t;
        return p;
    };
    for (std::size_t i = 0; i < total; ++i) u[i] = problem.initial(at(i, 0.0));

    std::vector<double> inv_dx2(nodes.size());
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        const double dx = (problem.domain[a].hi - problem.domain[a].lo) / static_cast<double>(nodes[a] - 1);
        inv_dx2[a] = 1.0 / (dx * dx);
    }

    double t = 0.0;
    for (double target : times) {
        const double gap = target - t;
        const auto steps = gap > 0.0 ? static_cast<std::size_t>(std::ceil(gap / dt - 1e-9)) : 0;
        const double h = steps > 0 ? gap / static_cast<double>(steps) : 0.0;
        for (std::size_t s = 0; s < steps; ++s) {
            const double t_new = t + h * static_cast<double>(s + 1);
            for (std::size_t ix = 0; ix < nx; ++ix) {
                for (std::size_t iy = 0; iy < ny; ++iy) {
                    const std::size_t i = ix * ny + iy;
                    if (on_boundary(i)) continue;
                    double lap = (u[i + ny] - 2.0 * u[i] + u[i - ny]) * inv_dx2[0];
                    if (two_d) lap += (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2[1];
                    const double q = problem.source ? problem.source(at(i, t + h * s)) : 0.0;
                    next[i] = u[i] + h * (problem.coeff * lap + q);
                }
            }
            for (std::size_t i = 0; i < total; ++i) {
                if (on_boundary(i)) next[i] = options.zero_boundary ? 0.0 : problem.bc_value(at(i, t_new));
            }
            u.swap(next);
        }
        t = target;
        sol.snapshots.push_back(u);
    }
    return sol;
}

}  // namespace qpinn
