#include "vbsar/grid.hpp"

namespace vbsar {

std::vector<double> Mesh::axis() const {
    std::vector<double> out(n);
    const double h = spacing();
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = -0.5 * length + h * static_cast<double>(i);
    }
    return out;
}

}  // namespace vbsar
