#ifndef QOC_TIME_GRID_HPP
#define QOC_TIME_GRID_HPP

#include <cmath>

#include "qoc/common.hpp"

namespace qoc {

/// Uniform time grid: samples t_i = i*dt for i = 0..n_steps, n_steps*dt = T.
struct TimeGrid {
    double t_final = 0.0;
    double dt = 0.0;
    int n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double T, double step) : t_final(T), dt(step) {
        if (!(step > 0) || !(T > 0)) throw Error("time grid: T and dt must be positive");
        n_steps = static_cast<int>(std::lround(T / step));
        if (n_steps < 1 || std::abs(n_steps * step - T) > 1e-12 * std::max(1.0, T))
            throw Error("time grid: T must be an integer multiple of dt");
    }

    double t(int i) const { return i * dt; }

    bool operator==(const TimeGrid& o) const {
        return t_final == o.t_final && dt == o.dt;
    }
};

}  // namespace qoc

#endif
