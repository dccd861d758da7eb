#pragma once

#include <chrono>
#include <cstddef>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "vbsar/inverse.hpp"

namespace vbsar {

/// sqrt(mean((est - truth)^2)). Throws std::invalid_argument on length mismatch.
double rmse(std::span<const double> estimate, std::span<const double> truth);

/// 1/2 sum u^2 with unit density and no cell-area factor.
double kinetic_energy(std::span<const double> u) noexcept;

/// |KE(est) - KE(truth)| / KE(truth); empty when KE(truth) == 0.
std::optional<double> ke_relative_error(std::span<const double> estimate,
                                        std::span<const double> truth);

template <class F>
auto timed(F&& operation) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
        std::forward<F>(operation)();
        return std::chrono::duration<double>(Clock::now() - start).count();
    } else {
        auto result = std::forward<F>(operation)();
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        return std::pair<decltype(result), double>(std::move(result), seconds);
    }
}

struct LedgerRecord {
    std::size_t row = 0;
    SolverTag tag = SolverTag::NL;
    double rmse = 0.0;
    double seconds = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string error;  ///< empty unless the row failed
};

struct SummaryRecord {
    SolverTag tag = SolverTag::NL;
    std::size_t rows = 0;
    std::size_t failures = 0;
    double median_rmse = 0.0;
    double ke_estimate = 0.0;
    double ke_truth = 0.0;
    std::optional<double> ke_relative_error;
    double total_seconds = 0.0;
};

/// Append-only record store; safe for concurrent append().
class RunLedger {
public:
    void append(LedgerRecord record);
    /// Records sorted by (row, solver tag) regardless of arrival order.
    std::vector<LedgerRecord> records() const;

    static constexpr const char* kHeader =
        "row,solver,rmse,seconds,iterations,converged,error";
    void write_csv(const std::string& path) const;
    static std::vector<LedgerRecord> read_csv(const std::string& path);

private:
    mutable std::mutex mutex_;
    std::vector<LedgerRecord> records_;
};

static constexpr const char* kSummaryHeader =
    "solver,rows,failures,median_rmse,ke_estimate,ke_truth,ke_relative_error,total_seconds";
void write_summary_csv(const std::string& path, std::span<const SummaryRecord> summary);

/// Shortest round-trippable text for a double (17 significant digits).
std::string format_double(double value);

}  // namespace vbsar
