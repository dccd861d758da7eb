#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "vbsar/grid.hpp"

namespace vbsar {

/// "VBG1" binary grid:
///   bytes 0-3   magic "VBG1"
///   bytes 4-7   rows, u32 little-endian
///   bytes 8-11  cols, u32 little-endian
///   byte  12    dtype: 0 = real64, 1 = complex128 (interleaved re, im)
///   byte  13    layout: 0 = row-major
///   bytes 14-45 config hash
///   payload     little-endian IEEE-754 doubles
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class GridDtype : std::uint8_t { Real64 = 0, Complex128 = 1 };

inline constexpr std::size_t kGridHeaderSize = 46;

struct GridFile {
    std::variant<RealGrid, ComplexGrid> grid;
    std::array<std::uint8_t, 32> config_hash{};

    const RealGrid& real() const;
    const ComplexGrid& complex() const;
};

std::string encode_grid(const RealGrid& grid, const std::array<std::uint8_t, 32>& hash);
std::string encode_grid(const ComplexGrid& grid, const std::array<std::uint8_t, 32>& hash);
GridFile decode_grid(const std::string& bytes);

void write_grid(const std::string& path, const RealGrid& grid,
                const std::array<std::uint8_t, 32>& hash);
void write_grid(const std::string& path, const ComplexGrid& grid,
                const std::array<std::uint8_t, 32>& hash);
GridFile read_grid(const std::string& path);

}  // namespace vbsar
