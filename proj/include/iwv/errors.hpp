#pragma once

#include <cmath>
#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>

namespace iwv {

/// Non-finite argument or an argument outside the operation's domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// The dark port receives no light (phi = 0 mod 2pi and k = 0).
class NoLightError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Post-selected state orthogonal to the pre-selected one; the weak value diverges.
class PostSelectionError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Numerical failure: exhausted sampler, empty band, too few photons.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(const std::string&)>;

namespace detail {
inline std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}
inline WarningHandler& warning_slot() {
  static WarningHandler h = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return h;
}
}  // namespace detail

/// Replaces the process-wide warning sink. Returns the previous handler.
inline WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(detail::warning_mutex());
  auto old = std::move(detail::warning_slot());
  detail::warning_slot() = std::move(handler);
  return old;
}

inline void warn(const std::string& msg) {
  std::lock_guard lock(detail::warning_mutex());
  if (detail::warning_slot()) detail::warning_slot()(msg);
}

namespace detail {
inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}
}  // namespace detail

}  // namespace iwv
