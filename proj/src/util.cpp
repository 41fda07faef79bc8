#include "alpool/util.hpp"

#include <cstdarg>
#include <cstdio>
#include <vector>

namespace alpool {

std::string strfmt(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  va_list copy;
  va_copy(copy, args);
  int n = std::vsnprintf(nullptr, 0, fmt, copy);
  va_end(copy);
  std::string out;
  if (n > 0) {
    out.resize(static_cast<std::size_t>(n) + 1);
    std::vsnprintf(out.data(), out.size(), fmt, args);
    out.resize(static_cast<std::size_t>(n));
  }
  va_end(args);
  return out;
}

std::string fmt_g17(double v) { return strfmt("%.17g", v); }

void fail(const std::string& msg) { throw std::runtime_error(msg); }

void fail_arg(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace alpool
