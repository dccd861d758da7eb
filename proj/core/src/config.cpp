#include "vbsar/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "vbsar/metrics.hpp"

namespace vbsar {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

struct Entry {
    std::string value;
    int line = 0;
};

using Table = std::map<std::string, Entry>;  // "section.key" -> value

double to_double(const std::string& key, const Entry& e) {
    double out = 0.0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(key, e.line, "expected a number, got '" + e.value + "'");
    }
    return out;
}

long long to_integer(const std::string& key, const Entry& e) {
    long long out = 0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(key, e.line, "expected an integer, got '" + e.value + "'");
    }
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const Entry& e) {
    std::uint64_t out = 0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(key, e.line, "expected a non-negative integer, got '" + e.value + "'");
    }
    return out;
}

// Schema of every accepted key, in canonical output order.
const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k = {
            "spectrum.alpha_s",      "spectrum.lambda_s",       "spectrum.gamma_s",
            "spectrum.phi_w",        "spectrum.p",              "geometry.incidence",
            "geometry.look_azimuth", "geometry.gravity",        "radar.V",
            "radar.B",               "radar.R",                 "radar.T0",
            "radar.tau_s",           "radar.lambda_r",          "scene.size",
            "scene.length",          "quadrature.window_scale", "quadrature.max_discarded_mass",
            "run.snr_db",            "run.seed",                "run.solvers",
            "run.rows",              "run.parallel",            "run.output_dir",
        };
        for (const char* s : {"nl", "fm", "dfm"}) {
            for (const char* f : {"max_iterations", "step_tolerance", "residual_tolerance",
                                  "fd_step", "regularization", "max_halvings"}) {
                k.push_back(std::string("solver.") + s + "." + f);
            }
        }
        return k;
    }();
    return keys;
}

Table tokenize(const std::string& text) {
    Table table;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    const auto& keys = known_keys();
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line, line_no, "unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            const bool known = std::any_of(keys.begin(), keys.end(), [&](const std::string& k) {
                return k.rfind(section + ".", 0) == 0 &&
                       k.find('.', section.size() + 1) == std::string::npos;
            });
            if (!known) throw ConfigError(section, line_no, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line, line_no, "expected 'key = value'");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        const auto hash = value.find(" #");
        if (hash != std::string::npos) value = trim(std::string_view(value).substr(0, hash));
        if (section.empty()) throw ConfigError(key, line_no, "key outside of any section");
        const std::string full = section + "." + key;
        if (std::find(keys.begin(), keys.end(), full) == keys.end()) {
            throw ConfigError(full, line_no, "unknown key");
        }
        if (table.count(full)) throw ConfigError(full, line_no, "duplicate key");
        table[full] = Entry{value, line_no};
    }
    return table;
}

// Re-raises a validation failure "field: message" against the key that
// carries that field in `section`.
[[noreturn]] void rethrow(const std::string& section, const std::invalid_argument& error,
                          const Table& table) {
    const std::string what = error.what();
    const auto colon = what.find(':');
    const std::string field = colon == std::string::npos ? what : what.substr(0, colon);
    const std::string key = section + "." + field;
    const auto it = table.find(key);
    std::string message = colon == std::string::npos ? what : what.substr(colon + 1);
    if (!message.empty() && message.front() == ' ') message.erase(0, 1);
    throw ConfigError(key, it == table.end() ? 0 : it->second.line, message);
}

std::string text_without(const RunConfig& c, bool scheduling) {
    std::ostringstream os;
    const auto num = [](double v) { return format_double(v); };
    os << "[spectrum]\n"
       << "alpha_s = " << num(c.spectrum.alpha_s) << '\n'
       << "lambda_s = " << num(c.spectrum.lambda_s) << '\n'
       << "gamma_s = " << num(c.spectrum.gamma_s) << '\n'
       << "phi_w = " << num(c.spectrum.phi_w) << '\n'
       << "p = " << num(c.spectrum.p) << "\n\n";
    os << "[geometry]\n"
       << "incidence = " << num(c.geometry.incidence) << '\n'
       << "look_azimuth = " << num(c.geometry.look_azimuth) << '\n'
       << "gravity = " << num(c.geometry.gravity) << "\n\n";
    os << "[radar]\n"
       << "V = " << num(c.radar.V) << '\n'
       << "B = " << num(c.radar.B) << '\n'
       << "R = " << num(c.radar.R) << '\n'
       << "T0 = " << num(c.radar.T0) << '\n'
       << "tau_s = " << num(c.radar.tau_s) << '\n'
       << "lambda_r = " << num(c.radar.lambda_r) << "\n\n";
    os << "[scene]\n"
       << "size = " << c.mesh.n << '\n'
       << "length = " << num(c.mesh.length) << "\n\n";
    os << "[quadrature]\n"
       << "window_scale = " << num(c.quadrature.window_scale) << '\n'
       << "max_discarded_mass = " << num(c.quadrature.max_discarded_mass) << "\n\n";
    os << "[run]\n"
       << "snr_db = " << num(c.snr_db) << '\n'
       << "seed = " << c.seed << '\n'
       << "solvers = ";
    for (std::size_t i = 0; i < c.solvers.size(); ++i) {
        os << (i ? "," : "") << to_string(c.solvers[i]);
    }
    os << '\n' << "rows = ";
    if (c.rows) {
        os << c.rows->first << ".." << c.rows->last;
    } else {
        os << "all";
    }
    os << '\n';
    if (scheduling) {
        os << "parallel = " << c.parallel << '\n' << "output_dir = " << c.output_dir << '\n';
    }
    const std::pair<const char*, const SolverOptions*> solvers[] = {
        {"nl", &c.nl}, {"fm", &c.fm}, {"dfm", &c.dfm}};
    for (const auto& [name, o] : solvers) {
        os << "\n[solver." << name << "]\n"
           << "max_iterations = " << o->max_iterations << '\n'
           << "step_tolerance = " << num(o->step_tolerance) << '\n'
           << "residual_tolerance = " << num(o->residual_tolerance) << '\n'
           << "fd_step = " << num(o->fd_step) << '\n'
           << "regularization = "
           << (o->regularization ? num(*o->regularization) : std::string("sigma1")) << '\n'
           << "max_halvings = " << o->max_halvings << '\n';
    }
    return os.str();
}

}  // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error(key + (line > 0 ? " (line " + std::to_string(line) + ")" : "") + ": " +
                         message),
      key_(std::move(key)),
      line_(line) {}

const SolverOptions& RunConfig::options_for(SolverTag tag) const {
    switch (tag) {
        case SolverTag::NL: return nl;
        case SolverTag::FM: return fm;
        case SolverTag::DFM: return dfm;
        case SolverTag::ATI: break;
    }
    throw std::invalid_argument("ATI has no iterative solver options");
}

bool RunConfig::runs(SolverTag tag) const {
    return std::find(solvers.begin(), solvers.end(), tag) != solvers.end();
}

std::vector<std::size_t> RunConfig::selected_rows() const {
    std::vector<std::size_t> out;
    const std::size_t first = rows ? rows->first : 0;
    const std::size_t last = rows ? rows->last : mesh.n - 1;
    for (std::size_t r = first; r <= last && r < mesh.n; ++r) out.push_back(r);
    return out;
}

std::optional<RowRange> parse_row_range(const std::string& text) {
    const std::string t = trim(text);
    if (t == "all") return std::nullopt;
    const auto dots = t.find("..");
    if (dots == std::string::npos) {
        throw std::invalid_argument("rows: expected 'a..b' or 'all', got '" + text + "'");
    }
    RowRange range;
    const std::string a = t.substr(0, dots);
    const std::string b = t.substr(dots + 2);
    const auto pa = std::from_chars(a.data(), a.data() + a.size(), range.first);
    const auto pb = std::from_chars(b.data(), b.data() + b.size(), range.last);
    if (a.empty() || b.empty() || pa.ec != std::errc() || pb.ec != std::errc() ||
        pa.ptr != a.data() + a.size() || pb.ptr != b.data() + b.size()) {
        throw std::invalid_argument("rows: expected 'a..b' or 'all', got '" + text + "'");
    }
    if (range.first > range.last) throw std::invalid_argument("rows: first row exceeds last");
    return range;
}

RunConfig parse_config(const std::string& text) {
    const Table table = tokenize(text);
    RunConfig c;
    const auto get = [&](const std::string& key) -> const Entry* {
        const auto it = table.find(key);
        return it == table.end() ? nullptr : &it->second;
    };
    const auto read_double = [&](const std::string& key, double& target) {
        if (const Entry* e = get(key)) target = to_double(key, *e);
    };

    SwellSpectrumParams sp = c.spectrum;
    read_double("spectrum.alpha_s", sp.alpha_s);
    read_double("spectrum.lambda_s", sp.lambda_s);
    read_double("spectrum.gamma_s", sp.gamma_s);
    read_double("spectrum.phi_w", sp.phi_w);
    read_double("spectrum.p", sp.p);
    try {
        c.spectrum = SwellSpectrumParams::make(sp.alpha_s, sp.lambda_s, sp.gamma_s, sp.phi_w, sp.p);
    } catch (const std::invalid_argument& e) {
        rethrow("spectrum", e, table);
    }

    read_double("geometry.incidence", c.geometry.incidence);
    read_double("geometry.look_azimuth", c.geometry.look_azimuth);
    read_double("geometry.gravity", c.geometry.gravity);
    try {
        c.geometry.validate();
    } catch (const std::invalid_argument& e) {
        rethrow("geometry", e, table);
    }

    RadarConfig r = c.radar;
    read_double("radar.V", r.V);
    read_double("radar.B", r.B);
    read_double("radar.R", r.R);
    read_double("radar.T0", r.T0);
    read_double("radar.tau_s", r.tau_s);
    read_double("radar.lambda_r", r.lambda_r);
    try {
        c.radar = RadarConfig::make(r.V, r.B, r.R, r.T0, r.tau_s, r.lambda_r);
    } catch (const std::invalid_argument& e) {
        rethrow("radar", e, table);
    }

    if (const Entry* e = get("scene.size")) {
        const long long n = to_integer("scene.size", *e);
        if (n < 4 || n > (1 << 16)) throw ConfigError("scene.size", e->line, "must lie in [4, 65536]");
        c.mesh.n = static_cast<std::size_t>(n);
    }
    read_double("scene.length", c.mesh.length);
    if (!(c.mesh.length > 0.0) || !std::isfinite(c.mesh.length)) {
        const Entry* e = get("scene.length");
        throw ConfigError("scene.length", e ? e->line : 0, "must be > 0");
    }

    read_double("quadrature.window_scale", c.quadrature.window_scale);
    read_double("quadrature.max_discarded_mass", c.quadrature.max_discarded_mass);
    if (!(c.quadrature.window_scale > 0.0) || !std::isfinite(c.quadrature.window_scale)) {
        const Entry* e = get("quadrature.window_scale");
        throw ConfigError("quadrature.window_scale", e ? e->line : 0, "must be > 0");
    }
    if (!(c.quadrature.max_discarded_mass >= 0.0)) {
        const Entry* e = get("quadrature.max_discarded_mass");
        throw ConfigError("quadrature.max_discarded_mass", e ? e->line : 0, "must be >= 0");
    }

    read_double("run.snr_db", c.snr_db);
    if (std::isnan(c.snr_db) || c.snr_db == -std::numeric_limits<double>::infinity()) {
        const Entry* e = get("run.snr_db");
        throw ConfigError("run.snr_db", e ? e->line : 0, "must be a number or +inf");
    }
    if (const Entry* e = get("run.seed")) c.seed = to_unsigned("run.seed", *e);
    if (const Entry* e = get("run.solvers")) {
        c.solvers.clear();
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            try {
                const SolverTag tag = parse_solver_tag(item);
                if (std::find(c.solvers.begin(), c.solvers.end(), tag) != c.solvers.end()) {
                    throw ConfigError("run.solvers", e->line, "duplicate solver '" + item + "'");
                }
                c.solvers.push_back(tag);
            } catch (const std::invalid_argument& err) {
                throw ConfigError("run.solvers", e->line, err.what());
            }
        }
        if (c.solvers.empty()) throw ConfigError("run.solvers", e->line, "no solver selected");
    }
    if (const Entry* e = get("run.rows")) {
        try {
            c.rows = parse_row_range(e->value);
        } catch (const std::invalid_argument& err) {
            throw ConfigError("run.rows", e->line, err.what());
        }
    }
    if (c.rows && c.rows->last >= c.mesh.n) {
        const Entry* e = get("run.rows");
        throw ConfigError("run.rows", e ? e->line : 0, "last row is outside the mesh");
    }
    if (const Entry* e = get("run.parallel")) {
        const long long p = to_integer("run.parallel", *e);
        if (p < 1 || p > 1024) throw ConfigError("run.parallel", e->line, "must lie in [1, 1024]");
        c.parallel = static_cast<int>(p);
    }
    if (const Entry* e = get("run.output_dir")) {
        if (e->value.empty()) throw ConfigError("run.output_dir", e->line, "must not be empty");
        c.output_dir = e->value;
    }

    const std::pair<const char*, SolverOptions*> solvers[] = {
        {"nl", &c.nl}, {"fm", &c.fm}, {"dfm", &c.dfm}};
    for (const auto& [name, o] : solvers) {
        const std::string prefix = std::string("solver.") + name + ".";
        if (const Entry* e = get(prefix + "max_iterations")) {
            o->max_iterations = static_cast<int>(to_integer(prefix + "max_iterations", *e));
        }
        read_double(prefix + "step_tolerance", o->step_tolerance);
        read_double(prefix + "residual_tolerance", o->residual_tolerance);
        read_double(prefix + "fd_step", o->fd_step);
        if (const Entry* e = get(prefix + "regularization")) {
            if (e->value == "sigma1") {
                o->regularization.reset();
            } else {
                o->regularization = to_double(prefix + "regularization", *e);
            }
        }
        if (const Entry* e = get(prefix + "max_halvings")) {
            o->max_halvings = static_cast<int>(to_integer(prefix + "max_halvings", *e));
        }
        try {
            o->validate();
        } catch (const std::invalid_argument& e) {
            rethrow(std::string("solver.") + name, e, table);
        }
    }

    c.hash = config_hash(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError(path, 0, "cannot open configuration file");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(const RunConfig& config) { return text_without(config, true); }

void save_config(const RunConfig& config, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << to_config_text(config);
}

ConfigHash config_hash(const RunConfig& config) {
    const std::string text = text_without(config, false);
    ConfigHash out{};
    unsigned int length = 0;
    if (EVP_Digest(text.data(), text.size(), out.data(), &length, EVP_sha256(), nullptr) != 1 ||
        length != out.size()) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    return out;
}

std::string hash_hex(const ConfigHash& hash) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : hash) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

}  // namespace vbsar
