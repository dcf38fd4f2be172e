#include <cstdlib>
#include <string_view>

#include "tailfactor/simd/kernels.hpp"

namespace tailfactor::simd {

#if defined(TAILFACTOR_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table() noexcept;
}
#endif

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() noexcept {
#if defined(TAILFACTOR_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") != 0;
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select() noexcept {
  if (const char* forced = std::getenv("TAILFACTOR_SIMD")) {
    if (std::string_view(forced) == "scalar") return scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable& kernels() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace tailfactor::simd
