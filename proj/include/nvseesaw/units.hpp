#pragma once

#include "nvseesaw/constants.hpp"

namespace nvseesaw::units {

// All internal math is SI (m, T, rad/s, s). Human-scale boundary units
// (nm, mT, MHz, us) are converted exactly once, here.

inline constexpr double m_from_nm(double nm) { return nm * 1e-9; }
inline constexpr double nm_from_m(double m) { return m * 1e9; }

inline constexpr double t_from_mt(double mt) { return mt * 1e-3; }
inline constexpr double mt_from_t(double t) { return t * 1e3; }

inline constexpr double pa_from_gpa(double gpa) { return gpa * 1e9; }

/// Cyclic megahertz to angular frequency.
inline constexpr double rad_s_from_mhz(double mhz) { return two_pi * mhz * 1e6; }
inline constexpr double mhz_from_rad_s(double w) { return w / (two_pi * 1e6); }

/// Plain hertz to cyclic megahertz.
inline constexpr double mhz_from_hz(double hz) { return hz * 1e-6; }

inline constexpr double s_from_us(double us) { return us * 1e-6; }
inline constexpr double us_from_s(double s) { return s * 1e6; }

/// Angular rate in rad/s to rad/us (the unit system the closed-form
/// concurrence expression is printed in).
inline constexpr double rad_us_from_rad_s(double w) { return w * 1e-6; }

} // namespace nvseesaw::units
