#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pepsmqc/simd/kernels.hpp"

namespace pepsmqc::simd {
namespace {

const KernelTable* resolve() {
    const char* env = std::getenv("PEPS_MQC_SIMD");
    const std::string choice = env ? env : "auto";
    if (choice == "scalar") {
        return &scalar_kernels();
    }
    if (avx2_kernels() != nullptr && cpu_supports_avx2()) {
        return avx2_kernels();
    }
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{resolve()};
    return current;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
    }
    return "unknown";
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(Isa isa) {
    if (isa == Isa::scalar) {
        slot().store(&scalar_kernels(), std::memory_order_release);
        return;
    }
    if (avx2_kernels() == nullptr || !cpu_supports_avx2()) {
        throw std::invalid_argument("AVX2 kernels are not available on this machine");
    }
    slot().store(avx2_kernels(), std::memory_order_release);
}

}  // namespace pepsmqc::simd
