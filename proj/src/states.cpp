#include "sepstab/states.hpp"

#include <cmath>

#include "sepstab/rng.hpp"

namespace sepstab {

Ket bell_state() { return maximally_entangled_state(2); }

Ket ghz_state(int parties, int d) {
    if (parties < 2 || d < 2) throw InvalidParameters("ghz_state: need parties >= 2, d >= 2");
    int total = 1;
    for (int i = 0; i < parties; ++i) total *= d;
    int unit = (total - 1) / (d - 1);  // 1 + d + ... + d^{n-1}
    std::vector<cdouble> amp(static_cast<std::size_t>(total), 0.0);
    for (int j = 0; j < d; ++j)
        amp[static_cast<std::size_t>(j * unit)] = 1.0 / std::sqrt(static_cast<double>(d));
    return Ket(std::move(amp), std::vector<int>(static_cast<std::size_t>(parties), d));
}

Ket w_state(int parties) {
    if (parties < 2) throw InvalidParameters("w_state: need parties >= 2");
    int total = 1 << parties;
    std::vector<cdouble> amp(static_cast<std::size_t>(total), 0.0);
    for (int k = 0; k < parties; ++k)
        amp[static_cast<std::size_t>(1 << (parties - 1 - k))] =
            1.0 / std::sqrt(static_cast<double>(parties));
    return Ket(std::move(amp), std::vector<int>(static_cast<std::size_t>(parties), 2));
}

Ket maximally_entangled_state(int d) {
    if (d < 2) throw InvalidParameters("maximally_entangled_state: need d >= 2");
    std::vector<cdouble> amp(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < d; ++j)
        amp[static_cast<std::size_t>(j * d + j)] = 1.0 / std::sqrt(static_cast<double>(d));
    return Ket(std::move(amp), {d, d});
}

Ket random_state(std::vector<int> dims, std::uint64_t seed) {
    int n = dim_product(dims);
    RngStream rng(seed);
    std::vector<cdouble> amp(static_cast<std::size_t>(n));
    double n2 = 0.0;
    for (auto& a : amp) {
        a = {rng.normal(), rng.normal()};
        n2 += std::norm(a);
    }
    double inv = 1.0 / std::sqrt(n2);
    for (auto& a : amp) a *= inv;
    return Ket(std::move(amp), std::move(dims));
}

} // namespace sepstab
