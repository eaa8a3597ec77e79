#pragma once

#include <complex>

namespace eomsim {

using cplx = std::complex<double>;

namespace consts {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J/K
inline constexpr double pi = 3.141592653589793;
inline constexpr double two_pi = 6.283185307179586;
}  // namespace consts

inline constexpr cplx im_unit{0.0, 1.0};

}  // namespace eomsim
