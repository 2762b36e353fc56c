#pragma once

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

namespace sensauth {

namespace detail {
inline std::atomic<bool>& warnings_enabled() {
  static std::atomic<bool> enabled{true};
  return enabled;
}
inline std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

inline void set_warnings_enabled(bool on) { detail::warnings_enabled() = on; }

inline void log_warning(const std::string& message) {
  if (!detail::warnings_enabled()) return;
  std::lock_guard<std::mutex> lock(detail::log_mutex());
  std::cerr << "warning: " << message << "\n";
}

}  // namespace sensauth
