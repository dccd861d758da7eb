#include "vbsar/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace vbsar {
namespace {

static_assert(std::numeric_limits<double>::is_iec559);

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
    }
    return v;
}

void put_f64(std::string& out, double value) {
    const auto bits = std::bit_cast<std::uint64_t>(value);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_f64(const std::string& in, std::size_t offset) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
    }
    return std::bit_cast<double>(bits);
}

std::string header(std::size_t rows, std::size_t cols, GridDtype dtype,
                   const std::array<std::uint8_t, 32>& hash) {
    if (rows > std::numeric_limits<std::uint32_t>::max() ||
        cols > std::numeric_limits<std::uint32_t>::max()) {
        throw FormatError("grid too large for the VBG1 format");
    }
    std::string out = "VBG1";
    put_u32(out, static_cast<std::uint32_t>(rows));
    put_u32(out, static_cast<std::uint32_t>(cols));
    out.push_back(static_cast<char>(dtype));
    out.push_back(0);
    out.append(reinterpret_cast<const char*>(hash.data()), hash.size());
    return out;
}

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error("short write to " + path);
}

}  // namespace

const RealGrid& GridFile::real() const {
    if (const auto* g = std::get_if<RealGrid>(&grid)) return *g;
    throw FormatError("grid holds complex128 data, real64 expected");
}

const ComplexGrid& GridFile::complex() const {
    if (const auto* g = std::get_if<ComplexGrid>(&grid)) return *g;
    throw FormatError("grid holds real64 data, complex128 expected");
}

std::string encode_grid(const RealGrid& grid, const std::array<std::uint8_t, 32>& hash) {
    std::string out = header(grid.rows(), grid.cols(), GridDtype::Real64, hash);
    out.reserve(kGridHeaderSize + 8 * grid.size());
    for (double v : grid.values()) put_f64(out, v);
    return out;
}

std::string encode_grid(const ComplexGrid& grid, const std::array<std::uint8_t, 32>& hash) {
    std::string out = header(grid.rows(), grid.cols(), GridDtype::Complex128, hash);
    out.reserve(kGridHeaderSize + 16 * grid.size());
    for (const Complex& v : grid.values()) {
        put_f64(out, v.real());
        put_f64(out, v.imag());
    }
    return out;
}

GridFile decode_grid(const std::string& bytes) {
    if (bytes.size() < kGridHeaderSize) throw FormatError("truncated VBG1 header");
    if (bytes.compare(0, 4, "VBG1") != 0) throw FormatError("bad magic, expected VBG1");
    const std::size_t rows = get_u32(bytes, 4);
    const std::size_t cols = get_u32(bytes, 8);
    const auto dtype = static_cast<unsigned char>(bytes[12]);
    const auto layout = static_cast<unsigned char>(bytes[13]);
    if (dtype > 1) throw FormatError("unknown dtype tag " + std::to_string(dtype));
    if (layout != 0) throw FormatError("unknown layout tag " + std::to_string(layout));

    GridFile file;
    std::memcpy(file.config_hash.data(), bytes.data() + 14, 32);
    const std::size_t width = dtype == 0 ? 8 : 16;
    const std::size_t count = rows * cols;
    if (cols != 0 && count / cols != rows) throw FormatError("grid dimensions overflow");
    if (bytes.size() - kGridHeaderSize != count * width) {
        throw FormatError("payload size does not match the header dimensions");
    }
    std::size_t offset = kGridHeaderSize;
    if (dtype == 0) {
        RealGrid g(rows, cols);
        for (double& v : g.values()) {
            v = get_f64(bytes, offset);
            offset += 8;
        }
        file.grid = std::move(g);
    } else {
        ComplexGrid g(rows, cols);
        for (Complex& v : g.values()) {
            v = Complex(get_f64(bytes, offset), get_f64(bytes, offset + 8));
            offset += 16;
        }
        file.grid = std::move(g);
    }
    return file;
}

void write_grid(const std::string& path, const RealGrid& grid,
                const std::array<std::uint8_t, 32>& hash) {
    write_bytes(path, encode_grid(grid, hash));
}

void write_grid(const std::string& path, const ComplexGrid& grid,
                const std::array<std::uint8_t, 32>& hash) {
    write_bytes(path, encode_grid(grid, hash));
}

GridFile read_grid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode_grid(bytes);
}

}  // namespace vbsar
