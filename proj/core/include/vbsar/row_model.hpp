#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vbsar/forward.hpp"

namespace vbsar {

/// Discretised velocity-bunching operator for one cross-track row with the
/// acceleration and NRCS frozen. Precomputes everything that does not depend
/// on u_r; evaluation is const and thread-safe.
class RowModel {
public:
    RowModel(std::vector<double> y, double period, std::vector<double> a_r,
             std::vector<double> sigma0, std::vector<double> y_r, const RadarConfig& config,
             const QuadratureOptions& quadrature = {});

    std::size_t n() const noexcept { return y_.size(); }
    std::size_t m() const noexcept { return y_r_.size(); }
    /// Quadrature weight of the y mesh (trapezoid on a periodic grid).
    double weight() const noexcept { return h_; }
    /// Quadrature weight of the yR mesh.
    double image_weight() const noexcept { return h_r_; }
    const RadarConfig& config() const noexcept { return config_; }
    std::span<const double> y() const noexcept { return y_; }
    std::span<const double> y_r() const noexcept { return y_r_; }
    std::span<const double> a_r() const noexcept { return a_r_; }
    std::span<const double> sigma0() const noexcept { return sigma0_; }
    double period() const noexcept { return period_; }

    /// I_vb on the yR mesh.
    std::vector<Complex> image(std::span<const double> u, bool* truncated = nullptr) const;

    /// Derivative entry A h (d f_vb / d u_r)(y_j, yR_i), compressed by image row.
    struct Entry {
        std::size_t j;
        Complex value;
    };

    struct Linearization {
        std::vector<Complex> image;
        std::vector<std::size_t> row_start;  ///< size m()+1
        std::vector<Entry> entries;
        bool truncated = false;
    };

    /// Image plus the weighted integrand derivative for every retained term.
    void linearize(std::span<const double> u, Linearization& out) const;

private:
    template <class Visit>
    bool for_each_term(std::span<const double> u, Visit&& visit) const;

    double wrap(double d) const noexcept;

    RadarConfig config_;
    QuadratureOptions quadrature_;
    std::vector<double> y_;
    std::vector<double> y_r_;
    std::vector<double> a_r_;
    std::vector<double> sigma0_;
    double period_ = 0.0;
    double h_ = 0.0;
    double h_r_ = 0.0;
    double rho_max_ = 0.0;
    double window_ = 0.0;

    // per-y constants
    std::vector<double> inv_rho2_;
    std::vector<double> amplitude_;
    std::vector<double> chirp_;
    std::vector<double> d_real_;
    std::vector<double> d_imag_;
};

}  // namespace vbsar
