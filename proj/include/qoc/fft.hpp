#ifndef QOC_FFT_HPP
#define QOC_FFT_HPP

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

#include "qoc/common.hpp"

namespace qoc {

/// Complex in-place FFT of a fixed size, wrapping FFTW plans.
/// One instance owns its scratch buffer, so concurrent transforms over
/// distinct instances are safe.
class Fft {
public:
    explicit Fft(int n) : n_(n) {
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        if (!buf_) throw Error("fft: allocation failed");
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft() {
        if (!buf_) return;
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&& o) noexcept
        : n_(o.n_), buf_(o.buf_), fwd_(o.fwd_), bwd_(o.bwd_) {
        o.buf_ = nullptr;
    }
    Fft& operator=(Fft&& o) noexcept {
        if (this != &o) {
            this->~Fft();
            n_ = o.n_;
            buf_ = o.buf_;
            fwd_ = o.fwd_;
            bwd_ = o.bwd_;
            o.buf_ = nullptr;
        }
        return *this;
    }

    int size() const { return n_; }

    /// Forward transform, convention e^{-i w t}, no normalization.
    void forward(Complex* data) const { run(fwd_, data); }

    /// Inverse transform carrying the 1/n factor.
    void inverse(Complex* data) const {
        run(bwd_, data);
        const double s = 1.0 / n_;
        for (int i = 0; i < n_; ++i) data[i] *= s;
    }

    void forward(CVector& v) const { forward(v.data()); }
    void inverse(CVector& v) const { inverse(v.data()); }

private:
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }
    void run(fftw_plan p, Complex* data) const {
        auto* io = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(p, io, io);
    }

    int n_;
    fftw_complex* buf_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

}  // namespace qoc

#endif
