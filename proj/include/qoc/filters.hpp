#ifndef QOC_FILTERS_HPP
#define QOC_FILTERS_HPP

#include <functional>
#include <iostream>
#include <memory>
#include <utility>
#include <vector>

#include "qoc/common.hpp"
#include "qoc/fft.hpp"
#include "qoc/field.hpp"

namespace qoc {

/// Filter operator G acting on candidate fields. Frequency masks must be
/// even, f(omega) = f(-omega), so filtered fields stay real.
class FieldFilter {
public:
    enum class Kind {
        Identity,
        SpectralMask,
        GaussianPass,
        GaussianStop,
        Band,
        Envelope,
        PhaseOnly,
        Chain
    };

    static FieldFilter identity() { return FieldFilter(Kind::Identity); }

    static FieldFilter spectral_mask(std::function<double(double)> f) {
        FieldFilter flt(Kind::SpectralMask);
        flt.mask_ = std::move(f);
        return flt;
    }

    /// Sum of Gaussian windows exp[-gamma (w -+ w0)^2] around each +-w0.
    static FieldFilter gaussian_pass(std::vector<double> centers, double gamma) {
        if (gamma <= 0) throw Error("filter: gamma must be positive");
        FieldFilter flt(Kind::GaussianPass);
        flt.mask_ = gaussian_mask(std::move(centers), gamma, false);
        return flt;
    }
    static FieldFilter gaussian_pass(double center, double gamma) {
        return gaussian_pass(std::vector<double>{center}, gamma);
    }

    /// Complement 1 - pass of a single-center Gaussian window.
    static FieldFilter gaussian_stop(double center, double gamma) {
        if (gamma <= 0) throw Error("filter: gamma must be positive");
        FieldFilter flt(Kind::GaussianStop);
        flt.mask_ = gaussian_mask({center}, gamma, true);
        return flt;
    }

    /// Hard band pass for |omega| in [w_a, w_b].
    static FieldFilter band(double w_a, double w_b) {
        if (!(w_a <= w_b)) throw Error("filter: band edges out of order");
        FieldFilter flt(Kind::Band);
        flt.mask_ = [w_a, w_b](double w) {
            const double aw = std::abs(w);
            return (aw >= w_a && aw <= w_b) ? 1.0 : 0.0;
        };
        return flt;
    }

    /// Time-domain envelope eps(t) -> h(t) eps(t), h >= 0.
    static FieldFilter envelope(std::function<double(double)> h) {
        FieldFilter flt(Kind::Envelope);
        flt.envelope_ = std::move(h);
        return flt;
    }

    /// Phase-only shaping: impose the amplitude spectrum A(omega) >= 0 while
    /// keeping the phases of the candidate field (phase 0 at silent bins).
    static FieldFilter phase_only(std::function<double(double)> amplitude) {
        FieldFilter flt(Kind::PhaseOnly);
        flt.mask_ = std::move(amplitude);
        return flt;
    }

    /// Left-to-right composition G_N[...G_1[eps]].
    static FieldFilter chain(std::vector<FieldFilter> filters) {
        FieldFilter flt(Kind::Chain);
        bool seen_frequency = false;
        for (const auto& f : filters) {
            if (f.kind_ == Kind::Envelope && seen_frequency)
                std::cerr << "[filters] notice: time-domain envelope applied "
                             "after a frequency-domain filter; filter order "
                             "changes the result\n";
            if (f.kind_ != Kind::Envelope && f.kind_ != Kind::Identity)
                seen_frequency = true;
        }
        flt.chain_ = std::make_shared<std::vector<FieldFilter>>(std::move(filters));
        return flt;
    }

    Kind kind() const { return kind_; }

    friend ControlField apply_filter(const FieldFilter&, const ControlField&);

private:
    explicit FieldFilter(Kind k) : kind_(k) {}

    static std::function<double(double)> gaussian_mask(std::vector<double> centers,
                                                       double gamma,
                                                       bool complement) {
        return [centers = std::move(centers), gamma, complement](double w) {
            double v = 0.0;
            for (double w0 : centers) {
                v += std::exp(-gamma * (w - w0) * (w - w0));
                v += std::exp(-gamma * (w + w0) * (w + w0));
            }
            return complement ? 1.0 - v : v;
        };
    }

    Kind kind_;
    std::function<double(double)> mask_;      // frequency masks / amplitude
    std::function<double(double)> envelope_;  // time-domain shape
    std::shared_ptr<std::vector<FieldFilter>> chain_;
};

namespace detail {

inline void filter_channel(const FieldFilter::Kind kind,
                           const std::function<double(double)>& mask,
                           const TimeGrid& tg, RVector& eps) {
    const int n = static_cast<int>(eps.size());
    const double dw = 2.0 * pi / (n * tg.dt);
    auto omega = [&](int m) { return (m <= n / 2 ? m : m - n) * dw; };

    // Check evenness on the actual bins: bin m pairs with bin n - m.
    for (int m = 1; m < n; ++m) {
        const double a = mask(omega(m));
        const double b = mask(omega(n - m));
        if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
            throw Error("filter: frequency mask is not even, f(w) != f(-w)");
        if (m > n - m) break;
    }

    CVector spec(n);
    for (int m = 0; m < n; ++m) spec[m] = eps[m];
    Fft fft(n);
    fft.forward(spec);

    if (kind == FieldFilter::Kind::PhaseOnly) {
        const double ref = spec.cwiseAbs().maxCoeff();
        for (int m = 0; m < n; ++m) {
            const double a = mask(omega(m));
            if (a < 0) throw Error("filter: amplitude spectrum must be >= 0");
            const double mag = std::abs(spec[m]);
            // Imposed amplitudes are in the dt-scaled spectrum convention.
            const Complex phase =
                (mag > 1e-14 * ref) ? spec[m] / mag : Complex(1.0, 0.0);
            spec[m] = (a / tg.dt) * phase;
        }
    } else {
        for (int m = 0; m < n; ++m) spec[m] *= mask(omega(m));
    }

    fft.inverse(spec);
    const double scale = std::max(1.0, spec.cwiseAbs().maxCoeff());
    for (int m = 0; m < n; ++m) {
        if (std::abs(spec[m].imag()) > 1e-10 * scale)
            throw Error("filter: output not real; mask symmetry violated");
        eps[m] = spec[m].real();
    }
}

}  // namespace detail

inline ControlField apply_filter(const FieldFilter& flt, const ControlField& eps) {
    ControlField out = eps;
    const TimeGrid& tg = eps.time_grid();
    switch (flt.kind_) {
        case FieldFilter::Kind::Identity:
            return out;
        case FieldFilter::Kind::Envelope:
            for (int j = 0; j < out.n_channels(); ++j)
                for (int i = 0; i < out.n_samples(); ++i) {
                    const double h = flt.envelope_(tg.t(i));
                    if (h < 0) throw Error("filter: envelope must be >= 0");
                    out.at(i, j) *= h;
                }
            return out;
        case FieldFilter::Kind::Chain:
            for (const auto& f : *flt.chain_) out = apply_filter(f, out);
            return out;
        default:
            for (int j = 0; j < out.n_channels(); ++j)
                detail::filter_channel(flt.kind_, flt.mask_, tg, out.channel(j));
            return out;
    }
}

}  // namespace qoc

#endif
