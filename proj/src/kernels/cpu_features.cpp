#include "geomcoder/kernels/cpu_features.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define GEOMCODER_X86 1
#include <cpuid.h>
#else
#define GEOMCODER_X86 0
#endif

namespace geomcoder::kernels {

CpuFeatures detect_cpu_features() {
    CpuFeatures f;
#if GEOMCODER_X86
    unsigned eax = 0, ebx = 0, ecx = 0, edx = 0;
    if (__get_cpuid(1, &eax, &ebx, &ecx, &edx)) {
        f.fma = (ecx & (1u << 12)) != 0;
        const bool osxsave = (ecx & (1u << 27)) != 0;
        const bool avx = (ecx & (1u << 28)) != 0;
        if (osxsave && avx) {
            // XGETBV: OS must enable XMM+YMM state saving.
            unsigned xcr0_lo, xcr0_hi;
            __asm__ volatile("xgetbv" : "=a"(xcr0_lo), "=d"(xcr0_hi) : "c"(0));
            if ((xcr0_lo & 0x6) == 0x6) {
                unsigned eax7 = 0, ebx7 = 0, ecx7 = 0, edx7 = 0;
                if (__get_cpuid_count(7, 0, &eax7, &ebx7, &ecx7, &edx7))
                    f.avx2 = (ebx7 & (1u << 5)) != 0;
            }
        }
    }
#endif
    return f;
}

}  // namespace geomcoder::kernels
