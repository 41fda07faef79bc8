#pragma once

#include <stdexcept>
#include <string>

namespace alpool {

// printf-style formatting into a std::string.
std::string strfmt(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

// Shortest decimal form that round-trips a double (17 significant digits).
std::string fmt_g17(double v);

[[noreturn]] void fail(const std::string& msg);  // throws std::runtime_error
[[noreturn]] void fail_arg(const std::string& msg);  // throws std::invalid_argument

}  // namespace alpool
