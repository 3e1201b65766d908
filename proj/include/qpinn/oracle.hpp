#pragma once

// Reference solutions: closed forms for both benchmarks and an explicit
// forward-time centred-space (FTCS) solver.

#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpinn/pde.hpp"

namespace qpinn {

inline constexpr double kHeat1dAlpha = 0.01 / std::numbers::pi;
inline constexpr double kHeat2dKappa = 2.0 / std::numbers::pi;

// sin(pi x) exp(-alpha pi^2 t)
double exact_heat1d(double x, double t, double alpha = kHeat1dAlpha);

// Gaussian exp(-10 r^2) convolved with the 2D heat kernel:
// exp(-10 r^2 / (1 + 40 kappa t)) / (1 + 40 kappa t).
double exact_heat2d_freespace(double x, double y, double t, double kappa = kHeat2dKappa);

class StabilityError : public std::invalid_argument {
  public:
    StabilityError(const std::string& what, double dt_max)
        : std::invalid_argument(what), dt_max_(dt_max) {}
    double dt_max() const { return dt_max_; }

  private:
    double dt_max_;
};

struct FdOptions {
    // Impose u = 0 on the boundary instead of the problem's Dirichlet data.
    bool zero_boundary{false};
};

struct FdSolution {
    std::vector<std::size_t> nodes;  // per spatial axis, endpoints included
    std::vector<Interval> domain;
    double dt{0.0};                  // requested step; steps are shortened to land on snapshot times
    std::vector<double> times;
    // snapshots[s][i] with i = ix (1D) or ix * ny + iy (2D)
    std::vector<std::vector<double>> snapshots;
    std::string scheme{"ftcs"};

    double coord(std::size_t axis, std::size_t i) const;
    std::size_t node_count() const;
    // Coordinates of flat node index i.
    std::vector<double> position(std::size_t i) const;
};

// Largest stable dt: coeff * dt * sum_axes 1/dx^2 <= 1/2.
double fd_stable_dt(const PdeProblem& problem, const std::vector<std::size_t>& nodes);

// Throws StabilityError when dt exceeds fd_stable_dt, std::invalid_argument on
// bad grids or snapshot times (must be >= 0 and strictly increasing).
FdSolution solve_fd(const PdeProblem& problem, const std::vector<std::size_t>& nodes, double dt,
                    const std::vector<double>& times, FdOptions options = {});

}  // namespace qpinn
