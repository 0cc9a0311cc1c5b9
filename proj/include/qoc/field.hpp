#ifndef QOC_FIELD_HPP
#define QOC_FIELD_HPP

#include <functional>
#include <utility>
#include <vector>

#include "qoc/common.hpp"
#include "qoc/fft.hpp"
#include "qoc/time_grid.hpp"

namespace qoc {

/// Real laser field sampled on a time grid, one series per polarization
/// component. Sample i is the field value held constant over [t_i, t_i+dt).
class ControlField {
public:
    ControlField() = default;
    ControlField(TimeGrid tg, int n_channels = 1)
        : tg_(tg), eps_(n_channels, RVector::Zero(tg.n_steps)) {
        if (n_channels < 1) throw Error("control field: need >= 1 channel");
    }

    static ControlField constant(TimeGrid tg, double value, int n_channels = 1) {
        ControlField f(tg, n_channels);
        for (auto& e : f.eps_) e.setConstant(value);
        return f;
    }

    static ControlField from_function(TimeGrid tg,
                                      const std::function<double(double)>& fn) {
        ControlField f(tg, 1);
        for (int i = 0; i < tg.n_steps; ++i) f.eps_[0][i] = fn(tg.t(i));
        return f;
    }

    const TimeGrid& time_grid() const { return tg_; }
    int n_channels() const { return static_cast<int>(eps_.size()); }
    int n_samples() const { return tg_.n_steps; }

    RVector& channel(int j) { return eps_.at(j); }
    const RVector& channel(int j) const { return eps_.at(j); }

    double operator()(int i, int j = 0) const { return eps_[j][i]; }
    double& at(int i, int j = 0) { return eps_[j][i]; }

    /// E0_j = sum_i eps_j(t_i)^2 dt.
    double fluence(int j = 0) const { return eps_.at(j).squaredNorm() * tg_.dt; }

    double max_abs(int j = 0) const { return eps_.at(j).cwiseAbs().maxCoeff(); }

    void scale(double c) {
        for (auto& e : eps_) e *= c;
    }

private:
    TimeGrid tg_;
    std::vector<RVector> eps_;
};

/// Discrete spectrum of one field channel: eps(w_m) ~ dt * DFT, which makes
/// Parseval bookkeeping exact: E0 = (1/2pi) sum |eps(w)|^2 dw.
struct FieldSpectrum {
    RVector omega;     // bin m in standard DFT order; negative for m > n/2
    CVector values;    // dt-scaled DFT coefficients

    double domega() const { return omega.size() > 1 ? omega[1] - omega[0] : 0.0; }

    double total_power() const {
        return values.squaredNorm() * domega() / (2.0 * pi);
    }

    /// Spectral power within [w_lo, w_hi] counting both signs of frequency.
    double band_power(double w_lo, double w_hi) const {
        double s = 0.0;
        for (int m = 0; m < omega.size(); ++m) {
            const double w = std::abs(omega[m]);
            if (w >= w_lo && w <= w_hi) s += std::norm(values[m]);
        }
        return s * domega() / (2.0 * pi);
    }
};

inline FieldSpectrum spectrum(const ControlField& f, int j = 0) {
    const int n = f.n_samples();
    FieldSpectrum sp;
    sp.omega.resize(n);
    sp.values.resize(n);
    const double dw = 2.0 * pi / (n * f.time_grid().dt);
    for (int m = 0; m < n; ++m) {
        sp.omega[m] = (m <= n / 2 ? m : m - n) * dw;
        sp.values[m] = f.channel(j)[m];
    }
    Fft fft(n);
    fft.forward(sp.values);
    sp.values *= f.time_grid().dt;
    return sp;
}

}  // namespace qoc

#endif
