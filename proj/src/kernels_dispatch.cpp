#include "sepstab/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace sepstab::kernels {

namespace {

const Ops* select() {
    const char* env = std::getenv("SEPSTAB_KERNELS");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return &scalar_ops();
    if (env != nullptr && std::strcmp(env, "avx2") == 0) {
        const Ops* v = avx2_ops();
        if (v != nullptr) return v;
        // requested but unavailable: fall through to scalar
        return &scalar_ops();
    }
    const Ops* v = avx2_ops();
    return v != nullptr ? v : &scalar_ops();
}

} // namespace

const Ops& active() {
    static const Ops* chosen = select();
    return *chosen;
}

const char* active_name() { return active().name; }

} // namespace sepstab::kernels
