#include "vbsar/row_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vbsar {
namespace {
constexpr double kPi = std::numbers::pi;
}

RowModel::RowModel(std::vector<double> y, double period, std::vector<double> a_r,
                   std::vector<double> sigma0, std::vector<double> y_r, const RadarConfig& config,
                   const QuadratureOptions& quadrature)
    : config_(config),
      quadrature_(quadrature),
      y_(std::move(y)),
      y_r_(std::move(y_r)),
      a_r_(std::move(a_r)),
      sigma0_(std::move(sigma0)),
      period_(period) {
    const std::size_t n = y_.size();
    if (n < 2) throw std::invalid_argument("RowModel: need at least two azimuth samples");
    if (a_r_.size() != n || sigma0_.size() != n) {
        throw std::invalid_argument("RowModel: a_r and sigma0 must match the y axis");
    }
    if (y_r_.empty()) throw std::invalid_argument("RowModel: empty image axis");
    if (!(period_ > 0.0)) throw std::invalid_argument("RowModel: period must be > 0");
    h_ = period_ / static_cast<double>(n);
    if (std::abs((y_[1] - y_[0]) - h_) > 1e-9 * h_) {
        throw std::invalid_argument("RowModel: y axis is not a uniform mesh of the period");
    }
    h_r_ = period_ / static_cast<double>(y_r_.size());

    const double rho = config_.rho_a;
    const double vt = config_.V * config_.T0;
    inv_rho2_.resize(n);
    amplitude_.resize(n);
    chirp_.resize(n);
    d_real_.resize(n);
    d_imag_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double rho_p = degraded_resolution(a_r_[j], config_);
        rho_max_ = std::max(rho_max_, rho_p);
        const double inv2 = 1.0 / (rho_p * rho_p);
        const double ratio = rho * rho * inv2;  // rho_a^2 / rho'^2
        inv_rho2_[j] = inv2;
        amplitude_[j] = sigma0_[j] / rho_p *
                        std::exp(4.0 * config_.B * config_.B * ratio / (vt * vt));
        chirp_[j] = 2.0 * config_.B * config_.k_r / config_.R * (2.0 * ratio - 1.0);
        d_real_[j] = 2.0 * kPi * kPi * config_.R / config_.V * inv2;
        d_imag_[j] = -4.0 * config_.B * config_.k_r / config_.V * ratio;
    }
    window_ = quadrature_.window_scale * rho_max_ / kPi;
}

double RowModel::wrap(double d) const noexcept {
    return d - period_ * std::floor((d + 0.5 * period_) / period_);
}

template <class Visit>
bool RowModel::for_each_term(std::span<const double> u, Visit&& visit) const {
    const std::size_t n = y_.size();
    if (u.size() != n) throw std::invalid_argument("RowModel: velocity row has the wrong length");
    const double lag = config_.R / config_.V;
    const double phase_rate = -2.0 * config_.k_r * config_.B / config_.V;

    double max_shift = 0.0;
    for (double v : u) max_shift = std::max(max_shift, std::abs(lag * v));
    if (!std::isfinite(max_shift)) {
        throw std::domain_error("RowModel: non-finite velocity");
    }

    const double reach = window_ + max_shift;
    const long half_width = static_cast<long>(std::ceil(reach / h_)) + 1;
    const long count = static_cast<long>(n);
    const bool full = 2 * half_width + 1 >= count;
    long lo = -half_width;
    long hi = half_width;
    bool truncated = false;
    if (full) {
        lo = -(count / 2);
        hi = count - count / 2 - 1;
        const double room = 0.5 * period_ - max_shift;
        const double discarded = room > 0.0 ? std::erfc(kPi * room / rho_max_) : 1.0;
        truncated = discarded > quadrature_.max_discarded_mass;
    }

    for (std::size_t i = 0; i < y_r_.size(); ++i) {
        const double yr = y_r_[i];
        const long centre = std::lround((yr - y_[0]) / h_);
        for (long o = lo; o <= hi; ++o) {
            const auto j = static_cast<std::size_t>(((centre + o) % count + count) % count);
            const double s = wrap(yr - y_[j]) - lag * u[j];
            if (std::abs(s) > window_) continue;
            const double envelope = amplitude_[j] * std::exp(-kPi * kPi * s * s * inv_rho2_[j]);
            const double phase = phase_rate * u[j] + chirp_[j] * s;
            visit(i, j, s, Complex(envelope * std::cos(phase), envelope * std::sin(phase)));
        }
    }
    return truncated;
}

std::vector<Complex> RowModel::image(std::span<const double> u, bool* truncated) const {
    std::vector<Complex> out(y_r_.size());
    const bool cut = for_each_term(u, [&](std::size_t i, std::size_t, double, Complex f) {
        out[i] += f;
    });
    const double scale = config_.A_const * h_;
    for (auto& v : out) v *= scale;
    if (truncated) *truncated = cut;
    return out;
}

void RowModel::linearize(std::span<const double> u, Linearization& out) const {
    const std::size_t m = y_r_.size();
    out.image.assign(m, Complex{});
    out.row_start.assign(m + 1, 0);
    out.entries.clear();
    const double scale = config_.A_const * h_;
    out.truncated = for_each_term(u, [&](std::size_t i, std::size_t j, double s, Complex f) {
        out.image[i] += f;
        out.entries.push_back({j, scale * Complex(d_real_[j] * s, d_imag_[j]) * f});
        out.row_start[i + 1] = out.entries.size();
    });
    // rows with no retained terms inherit the previous offset
    for (std::size_t i = 1; i <= m; ++i) {
        out.row_start[i] = std::max(out.row_start[i], out.row_start[i - 1]);
    }
    for (auto& v : out.image) v *= scale;
}

}  // namespace vbsar
