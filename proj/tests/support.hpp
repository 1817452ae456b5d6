#pragma once

// Shared generators for the test suites: random states, density matrices and
// Kraus channels, plus a couple of fixed operators used all over.

#include <cmath>
#include <vector>

#include "sepstab/channels.hpp"
#include "sepstab/linalg.hpp"
#include "sepstab/rng.hpp"

namespace testsup {

using sepstab::cdouble;
using sepstab::CMatrix;
using sepstab::DensityMatrix;
using sepstab::Ket;
using sepstab::Operator;
using sepstab::RngStream;

inline Ket random_ket(RngStream& rng, std::vector<int> dims) {
    int n = sepstab::dim_product(dims);
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

// Hilbert-Schmidt ensemble: G G^dagger normalized to unit trace.
inline DensityMatrix random_density(RngStream& rng, std::vector<int> dims) {
    int n = sepstab::dim_product(dims);
    CMatrix g(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (auto& e : g.a) e = {rng.normal(), rng.normal()};
    CMatrix rho = sepstab::matmul(g, sepstab::adjoint(g));
    cdouble tr = sepstab::mat_trace(rho);
    rho = sepstab::mat_scale(1.0 / tr.real(), rho);
    return DensityMatrix::from_operator(Operator(std::move(rho), std::move(dims)));
}

inline Operator pauli_x() {
    CMatrix m(2, 2);
    m.at(0, 1) = 1.0;
    m.at(1, 0) = 1.0;
    return Operator(std::move(m), {2});
}

inline Operator pauli_z() {
    CMatrix m(2, 2);
    m.at(0, 0) = 1.0;
    m.at(1, 1) = -1.0;
    return Operator(std::move(m), {2});
}

inline Ket basis_ket(int dim, int j) {
    std::vector<cdouble> amp(static_cast<std::size_t>(dim), 0.0);
    amp[static_cast<std::size_t>(j)] = 1.0;
    return Ket(std::move(amp), {dim});
}

inline Ket bell_pair() {
    const double r = 1.0 / std::sqrt(2.0);
    return Ket({r, 0.0, 0.0, r}, {2, 2});
}

// Random CPTP map: Gaussian blocks G_k whitened by S^{-1/2}, S = sum G^t G,
// so that sum K^dagger K = identity exactly.
inline sepstab::KrausChannel random_channel(RngStream& rng, int d, int n_kraus) {
    using namespace sepstab;
    std::vector<CMatrix> g(static_cast<std::size_t>(n_kraus));
    CMatrix s(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (auto& m : g) {
        m = CMatrix(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
        for (auto& e : m.a) e = {rng.normal(), rng.normal()};
        CMatrix t = matmul(adjoint(m), m);
        kernels::active().axpy(s.a.size(), 1.0, t.a.data(), s.a.data());
    }
    EigResult es = eig_hermitian(s);
    CMatrix isqrt(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (std::size_t j = 0; j < static_cast<std::size_t>(d); ++j) {
        double w = 1.0 / std::sqrt(es.values[j]);
        for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i)
            isqrt.at(i, j) = es.vectors.at(i, j) * w;
    }
    CMatrix root = matmul(isqrt, adjoint(es.vectors));  // S^{-1/2}
    std::vector<CMatrix> kraus;
    kraus.reserve(g.size());
    for (const CMatrix& m : g) kraus.push_back(matmul(m, root));
    return KrausChannel::from_matrices(std::move(kraus));
}

} // namespace testsup
