#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "alpool/kernels.hpp"

namespace alpool::kernels {

namespace {

const Ops* find(std::string_view name) {
  if (name == "scalar") return &scalar_ops();
  if (name == "avx2") return avx2_ops();
  if (name == "neon") return neon_ops();
  return nullptr;
}

const Ops* best() {
  if (const Ops* o = avx2_ops()) return o;
  if (const Ops* o = neon_ops()) return o;
  return &scalar_ops();
}

const Ops* resolve_initial() {
  if (const char* env = std::getenv("ALPOOL_KERNELS")) {
    const std::string_view v(env);
    if (!v.empty() && v != "auto") {
      if (const Ops* o = find(v)) return o;
      std::fprintf(stderr, "alpool: ALPOOL_KERNELS=%s unavailable, using auto selection\n", env);
    }
  }
  return best();
}

std::atomic<const Ops*> g_active{nullptr};

}  // namespace

const Ops& active() {
  const Ops* p = g_active.load(std::memory_order_acquire);
  if (!p) {
    p = resolve_initial();
    g_active.store(p, std::memory_order_release);
  }
  return *p;
}

bool select(std::string_view name) {
  const Ops* p = (name == "auto") ? best() : find(name);
  if (!p) return false;
  g_active.store(p, std::memory_order_release);
  return true;
}

std::vector<const Ops*> available() {
  std::vector<const Ops*> out{&scalar_ops()};
  if (const Ops* o = avx2_ops()) out.push_back(o);
  if (const Ops* o = neon_ops()) out.push_back(o);
  return out;
}

}  // namespace alpool::kernels
