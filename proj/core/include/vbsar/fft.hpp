#pragma once

#include "vbsar/grid.hpp"

namespace vbsar {

/// Unnormalised 2-D inverse DFT (exponent sign +1):
/// out(m, n) = sum_{p,q} in(p, q) exp(+2 pi i (p m / rows + q n / cols)).
ComplexGrid inverse_fft2(const ComplexGrid& in);

/// Unnormalised 2-D forward DFT (exponent sign -1).
ComplexGrid forward_fft2(const ComplexGrid& in);

}  // namespace vbsar
