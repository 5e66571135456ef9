#include <cstdlib>
#include <cstring>

#include "cdpa/kernels.hpp"

namespace cdpa::kernels {

#if defined(CDPA_HAVE_AVX2_KERNELS)
const Table* avx2_table_impl() noexcept;
#endif

const Table* avx2_table() noexcept {
#if defined(CDPA_HAVE_AVX2_KERNELS)
  return avx2_table_impl();
#else
  return nullptr;
#endif
}

bool cpu_has_avx2() noexcept {
#if defined(CDPA_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Table& select() noexcept {
  const char* forced = std::getenv("CDPA_ISA");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return scalar_table();
  if (const Table* t = avx2_table(); t != nullptr && cpu_has_avx2()) return *t;
  return scalar_table();
}

}  // namespace

const Table& active() noexcept {
  static const Table& table = select();
  return table;
}

const char* isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace cdpa::kernels
