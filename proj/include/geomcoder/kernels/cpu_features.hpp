// Runtime CPU capability probing for kernel dispatch.
#pragma once

namespace geomcoder::kernels {

struct CpuFeatures {
    bool avx2 = false;
    bool fma = false;
};

// CPUID-based detection on x86-64; all-false elsewhere.
CpuFeatures detect_cpu_features();

}  // namespace geomcoder::kernels
