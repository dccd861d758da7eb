#include "vbsar/fft.hpp"

#include <mutex>

#include <fftw3.h>

namespace vbsar {
namespace {

// fftw planner calls are not re-entrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

ComplexGrid transform(const ComplexGrid& in, int sign) {
    ComplexGrid out(in.rows(), in.cols());
    if (in.empty()) return out;
    ComplexGrid work = in;
    auto* src = reinterpret_cast<fftw_complex*>(work.values().data());
    auto* dst = reinterpret_cast<fftw_complex*>(out.values().data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(in.rows()), static_cast<int>(in.cols()), src, dst,
                                sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace

ComplexGrid inverse_fft2(const ComplexGrid& in) { return transform(in, FFTW_BACKWARD); }

ComplexGrid forward_fft2(const ComplexGrid& in) { return transform(in, FFTW_FORWARD); }

}  // namespace vbsar
