#include "vbsar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace vbsar {
namespace {

std::string sanitize(std::string text) {
    for (char& c : text) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return text;
}

}  // namespace

double rmse(std::span<const double> estimate, std::span<const double> truth) {
    if (estimate.size() != truth.size()) {
        throw std::invalid_argument("rmse: rows have different lengths");
    }
    if (estimate.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double d = estimate[i] - truth[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(estimate.size()));
}

double kinetic_energy(std::span<const double> u) noexcept {
    double sum = 0.0;
    for (double v : u) sum += v * v;
    return 0.5 * sum;
}

std::optional<double> ke_relative_error(std::span<const double> estimate,
                                        std::span<const double> truth) {
    if (estimate.size() != truth.size()) {
        throw std::invalid_argument("ke_relative_error: fields have different sizes");
    }
    const double reference = kinetic_energy(truth);
    if (reference == 0.0) return std::nullopt;
    return std::abs(kinetic_energy(estimate) - reference) / reference;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void RunLedger::append(LedgerRecord record) {
    std::lock_guard lock(mutex_);
    records_.push_back(std::move(record));
}

std::vector<LedgerRecord> RunLedger::records() const {
    std::vector<LedgerRecord> out;
    {
        std::lock_guard lock(mutex_);
        out = records_;
    }
    std::sort(out.begin(), out.end(), [](const LedgerRecord& a, const LedgerRecord& b) {
        return std::tie(a.row, a.tag) < std::tie(b.row, b.tag);
    });
    return out;
}

void RunLedger::write_csv(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << kHeader << '\n';
    for (const auto& r : records()) {
        os << r.row << ',' << to_string(r.tag) << ',' << format_double(r.rmse) << ','
           << format_double(r.seconds) << ',' << r.iterations << ',' << (r.converged ? 1 : 0)
           << ',' << sanitize(r.error) << '\n';
    }
}

std::vector<LedgerRecord> RunLedger::read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(is, line);
    if (line != kHeader) throw std::runtime_error(path + ": unexpected ledger header");
    std::vector<LedgerRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() == 6) fields.emplace_back();
        if (fields.size() != 7) throw std::runtime_error(path + ": malformed ledger line");
        LedgerRecord r;
        r.row = std::stoul(fields[0]);
        r.tag = parse_solver_tag(fields[1]);
        r.rmse = std::stod(fields[2]);
        r.seconds = std::stod(fields[3]);
        r.iterations = std::stoi(fields[4]);
        r.converged = fields[5] == "1";
        r.error = fields[6];
        out.push_back(std::move(r));
    }
    return out;
}

void write_summary_csv(const std::string& path, std::span<const SummaryRecord> summary) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << kSummaryHeader << '\n';
    for (const auto& s : summary) {
        os << to_string(s.tag) << ',' << s.rows << ',' << s.failures << ','
           << format_double(s.median_rmse) << ',' << format_double(s.ke_estimate) << ','
           << format_double(s.ke_truth) << ','
           << (s.ke_relative_error ? format_double(*s.ke_relative_error) : std::string("missing"))
           << ',' << format_double(s.total_seconds) << '\n';
    }
}

}  // namespace vbsar
