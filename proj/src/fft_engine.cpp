#include "nlc/fft_engine.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace nlc {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* fc(ComplexArray& a) { return reinterpret_cast<fftw_complex*>(a.data()); }
const fftw_complex* fc(const ComplexArray& a) {
    return reinterpret_cast<const fftw_complex*>(a.data());
}

} // namespace

FftEngine::FftEngine(const Grid& grid) : n_(grid.n()), size_(grid.size()) {
    const int n = n_;
    const int nh = n / 2 + 1;
    half_size_ = static_cast<std::int64_t>(n) * n * nh;

    {
        // Plan on scratch arrays with the same allocator as runtime arrays so
        // the new-array execute calls see a matching alignment class.
        std::scoped_lock lock(planner_mutex());
        ComplexArray ca(size_), cb(size_), ch(half_size_);
        RealArray ra(size_);
        plan_c2c_fwd_ = fftw_plan_dft_3d(n, n, n, fc(ca), fc(cb), FFTW_FORWARD, FFTW_MEASURE);
        plan_c2c_bwd_ = fftw_plan_dft_3d(n, n, n, fc(ca), fc(cb), FFTW_BACKWARD, FFTW_MEASURE);
        plan_r2c_ = fftw_plan_dft_r2c_3d(n, n, n, ra.data(), fc(ch), FFTW_MEASURE);
        plan_c2r_ = fftw_plan_dft_c2r_3d(n, n, n, fc(ch), ra.data(), FFTW_MEASURE);
        if (!plan_c2c_fwd_ || !plan_c2c_bwd_ || !plan_r2c_ || !plan_c2r_)
            throw std::runtime_error("FftEngine: FFTW planning failed");
    }

    const int cutoff = n / 3; // 2/3-rule: keep |m| <= floor(N/3)
    const double dk = grid.dk();

    auto fill = [&](bool half) {
        const int nx = half ? nh : n;
        const std::int64_t sz = half ? half_size_ : size_;
        RealArray k2(sz), k2zv(sz), mask(sz), w(sz);
        RealArray d[3] = {RealArray(sz), RealArray(sz), RealArray(sz)};
        RealArray ka[3] = {RealArray(sz), RealArray(sz), RealArray(sz)};
        std::int64_t idx = 0;
        for (int iz = 0; iz < n; ++iz) {
            const int mz = grid.mode(iz);
            for (int iy = 0; iy < n; ++iy) {
                const int my = grid.mode(iy);
                for (int ix = 0; ix < nx; ++ix, ++idx) {
                    const int mx = half ? ix : grid.mode(ix); // half cube: mx in 0..N/2
                    const double kx = dk * (half && ix == n / 2 ? -n / 2 : mx);
                    const double ky = dk * my;
                    const double kz = dk * mz;
                    const double dx = std::abs(mx) == n / 2 ? 0.0 : kx;
                    const double dy = std::abs(my) == n / 2 ? 0.0 : ky;
                    const double dz = std::abs(mz) == n / 2 ? 0.0 : kz;
                    d[0][idx] = dx;
                    d[1][idx] = dy;
                    d[2][idx] = dz;
                    ka[0][idx] = std::abs(kx);
                    ka[1][idx] = std::abs(ky);
                    ka[2][idx] = std::abs(kz);
                    k2[idx] = kx * kx + ky * ky + kz * kz;
                    k2zv[idx] = dx * dx + dy * dy + dz * dz;
                    const int mmax = std::max({std::abs(mx), std::abs(my), std::abs(mz)});
                    mask[idx] = mmax > cutoff ? 0.0 : 1.0;
                    w[idx] = (half && ix != 0 && ix != n / 2) ? 2.0 : 1.0;
                }
            }
        }
        RealArray inv = (k2zv > 0.0).select(k2zv.inverse(), RealArray::Zero(sz));
        if (half) {
            k2_h_ = std::move(k2);
            k2z_h_ = std::move(k2zv);
            inv_k2z_h_ = std::move(inv);
            mask_h_ = std::move(mask);
            weight_h_ = std::move(w);
            for (int a = 0; a < 3; ++a) dk_h_[a] = std::move(d[a]);
        } else {
            kmag_ = k2.sqrt();
            k2_ = std::move(k2);
            k2z_ = std::move(k2zv);
            inv_k2z_ = std::move(inv);
            mask_ = std::move(mask);
            for (int a = 0; a < 3; ++a) {
                dk_[a] = std::move(d[a]);
                kabs_[a] = std::move(ka[a]);
            }
        }
    };
    fill(false);
    fill(true);
}

FftEngine::~FftEngine() {
    std::scoped_lock lock(planner_mutex());
    if (plan_c2c_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_c2c_fwd_));
    if (plan_c2c_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_c2c_bwd_));
    if (plan_r2c_) fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
    if (plan_c2r_) fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
}

const FftEngine& FftEngine::get(const Grid& grid) {
    static std::mutex cache_mutex;
    static std::map<std::pair<int, double>, std::unique_ptr<FftEngine>> cache;
    std::scoped_lock lock(cache_mutex);
    auto key = std::make_pair(grid.n(), grid.length());
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::unique_ptr<FftEngine>(new FftEngine(grid))).first;
    return *it->second;
}

void FftEngine::forward_c2c(const ComplexArray& in, ComplexArray& out) const {
    out.resize(size_);
    fftw_execute_dft(static_cast<fftw_plan>(plan_c2c_fwd_),
                     const_cast<fftw_complex*>(fc(in)), fc(out));
}

void FftEngine::backward_c2c(const ComplexArray& in, ComplexArray& out) const {
    out.resize(size_);
    fftw_execute_dft(static_cast<fftw_plan>(plan_c2c_bwd_),
                     const_cast<fftw_complex*>(fc(in)), fc(out));
}

void FftEngine::forward_r2c(const RealArray& in, ComplexArray& half_out) const {
    half_out.resize(half_size_);
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), const_cast<double*>(in.data()),
                         fc(half_out));
}

void FftEngine::backward_c2r(ComplexArray& half_in, RealArray& out) const {
    out.resize(size_);
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_), fc(half_in), out.data());
}

ComplexArray FftEngine::fold(const ComplexArray& full) const {
    const int n = n_;
    const int nh = n / 2 + 1;
    ComplexArray half(half_size_);
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy) {
            const std::int64_t src = static_cast<std::int64_t>(n) * (iy + static_cast<std::int64_t>(n) * iz);
            const std::int64_t dst = static_cast<std::int64_t>(nh) * (iy + static_cast<std::int64_t>(n) * iz);
            half.segment(dst, nh) = full.segment(src, nh);
        }
    return half;
}

ComplexArray FftEngine::unfold(const ComplexArray& half) const {
    const int n = n_;
    const int nh = n / 2 + 1;
    ComplexArray full(size_);
    for (int iz = 0; iz < n; ++iz) {
        const int jz = (n - iz) % n;
        for (int iy = 0; iy < n; ++iy) {
            const int jy = (n - iy) % n;
            const std::int64_t row = static_cast<std::int64_t>(n) * (iy + static_cast<std::int64_t>(n) * iz);
            const std::int64_t hrow = static_cast<std::int64_t>(nh) * (iy + static_cast<std::int64_t>(n) * iz);
            const std::int64_t hrow_conj = static_cast<std::int64_t>(nh) * (jy + static_cast<std::int64_t>(n) * jz);
            full.segment(row, nh) = half.segment(hrow, nh);
            for (int ix = nh; ix < n; ++ix)
                full[row + ix] = std::conj(half[hrow_conj + (n - ix)]);
        }
    }
    return full;
}

} // namespace nlc
