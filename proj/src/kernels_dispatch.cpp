#include "acdc/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace acdc::kernels {
namespace {

struct Selection {
  const Ops* ops;
  const char* name;
};

Selection select() {
  const char* env = std::getenv("ACDC_SIMD");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return {&scalar_ops, "scalar"};
    if (std::strcmp(env, "avx2") == 0) return {&avx2_ops, "avx2"};
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return {&avx2_ops, "avx2"};
#endif
  return {&scalar_ops, "scalar"};
}

const Selection g_selection = select();

}  // namespace

const Ops& active() { return *g_selection.ops; }
std::string_view active_name() { return g_selection.name; }

}  // namespace acdc::kernels
