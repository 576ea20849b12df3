// src/kernels/kernels_dispatch.cc

// Copyright 2026  The nda-backend Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "nda/kernels.h"

namespace nda::kernels {
namespace {

bool CpuHasAvx2() {
#if defined(NDA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa DetectBest() {
  if (CpuHasAvx2()) return Isa::kAvx2;
#if defined(NDA_HAVE_NEON)
  return Isa::kNeon;  // mandatory on aarch64
#else
  return Isa::kScalar;
#endif
}

Isa InitialIsa() {
  const char *env = std::getenv("NDA_KERNELS");
  if (env != nullptr) {
    std::string name(env);
    if (name == "scalar") return Isa::kScalar;
    if (name == "avx2" && IsaSupported(Isa::kAvx2)) return Isa::kAvx2;
    if (name == "neon" && IsaSupported(Isa::kNeon)) return Isa::kNeon;
  }
  return DetectBest();
}

std::atomic<const KernelTable *> &ActiveSlot() {
  static std::atomic<const KernelTable *> slot{&Table(InitialIsa())};
  return slot;
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool IsaSupported(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2: return CpuHasAvx2();
    case Isa::kNeon:
#if defined(NDA_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable &Table(Isa isa) {
  if (!IsaSupported(isa))
    throw std::invalid_argument("kernel variant not available: " +
                                std::string(IsaName(isa)));
  switch (isa) {
#if defined(NDA_HAVE_AVX2)
    case Isa::kAvx2: return detail::Avx2Table();
#endif
#if defined(NDA_HAVE_NEON)
    case Isa::kNeon: return detail::NeonTable();
#endif
    default: return detail::ScalarTable();
  }
}

const KernelTable &Active() { return *ActiveSlot().load(std::memory_order_acquire); }

void SetActive(Isa isa) {
  ActiveSlot().store(&Table(isa), std::memory_order_release);
}

}  // namespace nda::kernels
