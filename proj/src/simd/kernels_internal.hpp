#pragma once

#include "msci/simd.hpp"

namespace msci::simd {

extern const KernelTable kScalarKernels;
#if defined(MSCI_HAVE_AVX2)
extern const KernelTable kAvx2Kernels;
#endif
#if defined(MSCI_HAVE_NEON)
extern const KernelTable kNeonKernels;
#endif

}  // namespace msci::simd
