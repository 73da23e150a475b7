#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace usdmplc::detail {

namespace {

std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plan_cache;

fftw_plan plan_for(int ny, int nx, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    const auto key = std::make_tuple(ny, nx, sign);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;
    // Plan on a scratch buffer, execute later on caller buffers via the
    // new-array interface. Both come from fftw_malloc, so alignment matches.
    fftw_complex* scratch = fftw_alloc_complex(static_cast<size_t>(ny) * nx);
    fftw_plan plan = fftw_plan_dft_2d(ny, nx, scratch, scratch, sign, FFTW_ESTIMATE);
    fftw_free(scratch);
    plan_cache.emplace(key, plan);
    return plan;
}

}  // namespace

void fft2(int ny, int nx, std::complex<double>* data, bool inverse) {
    const int sign = inverse ? FFTW_BACKWARD : FFTW_FORWARD;
    fftw_plan plan = plan_for(ny, nx, sign);
    const size_t n = static_cast<size_t>(ny) * nx;
    fftw_complex* buf = fftw_alloc_complex(n);
    auto* src = reinterpret_cast<const double*>(data);
    auto* dst = reinterpret_cast<double*>(buf);
    for (size_t i = 0; i < 2 * n; ++i) dst[i] = src[i];
    fftw_execute_dft(plan, buf, buf);
    auto* out = reinterpret_cast<double*>(data);
    for (size_t i = 0; i < 2 * n; ++i) out[i] = dst[i];
    fftw_free(buf);
}

}  // namespace usdmplc::detail
