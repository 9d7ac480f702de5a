#pragma once

#include <stdexcept>
#include <string>

namespace nvseesaw {

/// Configuration file / schema problems. CLI maps these to exit code 1.
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Physics-domain violations (valid input, unusable regime). CLI exit code 2.
class domain_error : public std::runtime_error {
  public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested deflection closes the tip-spin gap completely.
class gap_closure_error : public domain_error {
  public:
    explicit gap_closure_error(const std::string& what) : domain_error(what) {}
};

/// Drive parameters leave the effective two-level description (e.g. Rabi <= 0).
class parameter_regime_error : public domain_error {
  public:
    explicit parameter_regime_error(const std::string& what) : domain_error(what) {}
};

/// A resonator-spin detuning hit zero; the dispersive elimination is invalid.
class dispersive_breakdown_error : public domain_error {
  public:
    explicit dispersive_breakdown_error(const std::string& what) : domain_error(what) {}
};

} // namespace nvseesaw
