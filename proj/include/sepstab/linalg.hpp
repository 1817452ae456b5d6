#pragma once

// Dense complex linear algebra substrate: kets and operators with tensor
// factor bookkeeping, Kronecker products, Hermitian eigendecomposition
// (cyclic Jacobi), SVD (one-sided Jacobi) and the Schmidt decomposition,
// plus the numerical predicates used across the library.
//
// All heavy inner loops run through the kernels:: dispatch table.

#include <complex>
#include <cstddef>
#include <vector>

#include "sepstab/errors.hpp"
#include "sepstab/kernels.hpp"
#include "sepstab/tolerances.hpp"

namespace sepstab {

using cdouble = std::complex<double>;

int dim_product(const std::vector<int>& dims);

// ---------------------------------------------------------------------------
// Raw row-major complex matrix (no tensor structure). Used for Kraus
// operators, eigenvector stacks and internal workspaces.
struct CMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<cdouble> a;

    CMatrix() = default;
    CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    cdouble& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const cdouble& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    bool operator==(const CMatrix&) const = default;

    static CMatrix identity(std::size_t n);
};

CMatrix matmul(const CMatrix& x, const CMatrix& y);
CMatrix kron(const CMatrix& x, const CMatrix& y);
CMatrix adjoint(const CMatrix& x);
CMatrix mat_add(const CMatrix& x, const CMatrix& y);
CMatrix mat_sub(const CMatrix& x, const CMatrix& y);
CMatrix mat_scale(cdouble s, const CMatrix& x);
cdouble mat_trace(const CMatrix& x);
double frob_norm(const CMatrix& x);
double frob_dist(const CMatrix& x, const CMatrix& y);
double max_abs_diff(const CMatrix& x, const CMatrix& y);
std::vector<cdouble> mat_vec(const CMatrix& m, const std::vector<cdouble>& v);

// ---------------------------------------------------------------------------
// Pure state: complex amplitudes over a tensor product of factors.
// Invariants: product(dims) == amp.size(), Euclidean norm 1 within TOL_NORM.
struct Ket {
    std::vector<cdouble> amp;
    std::vector<int> dims;

    Ket() = default;
    Ket(std::vector<cdouble> amplitudes, std::vector<int> factor_dims);

    int dim() const { return static_cast<int>(amp.size()); }
    double norm() const;
};

// Square operator on a tensor product of factors.
struct Operator {
    CMatrix mat;
    std::vector<int> dims;

    Operator() = default;
    Operator(CMatrix m, std::vector<int> factor_dims);

    int dim() const { return static_cast<int>(mat.rows); }

    static Operator identity(std::vector<int> factor_dims);
};

Operator op_add(const Operator& x, const Operator& y);
Operator op_sub(const Operator& x, const Operator& y);
Operator op_scale(cdouble s, const Operator& x);
Operator op_mul(const Operator& x, const Operator& y);
Operator op_adjoint(const Operator& x);
cdouble op_trace(const Operator& x);
double frob_dist(const Operator& x, const Operator& y);
double commutator_norm(const Operator& x, const Operator& y);
std::vector<cdouble> apply(const Operator& m, const Ket& k);

// |k><k| with k's factor structure.
Operator outer(const Ket& k);

// Kronecker products; dims concatenate.
Ket tensor(const Ket& x, const Ket& y);
Operator tensor(const Operator& x, const Operator& y);

// <x|y> (x conjugated); dims must agree in total dimension.
cdouble inner(const Ket& x, const Ket& y);

// |<x|y>| >= 1 - TOL_RECON, i.e. equality up to a global phase.
bool equal_up_to_phase(const Ket& x, const Ket& y, double tol = TOL_RECON);

// ---------------------------------------------------------------------------
// Validated mixed state: Hermitian within TOL_HERM, eigenvalues >= -TOL_PSD
// (checked by Cholesky of rho + TOL_PSD*I), unit trace within TOL_TRACE.
struct DensityMatrix {
    Operator op;

    static DensityMatrix from_operator(Operator o);
    static DensityMatrix pure(const Ket& k);
    static DensityMatrix maximally_mixed(std::vector<int> dims);

    int dim() const { return op.dim(); }
    const std::vector<int>& dims() const { return op.dims; }
};

// a*x + b*y, revalidated.
DensityMatrix mix(double a, const DensityMatrix& x, double b, const DensityMatrix& y);

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition. values descending; vectors are the columns
// of `vectors`, aligned with `values`. Throws NotHermitian.
struct EigResult {
    std::vector<double> values;
    CMatrix vectors;

    std::vector<cdouble> vector(std::size_t j) const;
};

EigResult eig_hermitian(const Operator& h);
EigResult eig_hermitian(const CMatrix& h);

double min_eigenvalue(const Operator& h);

bool is_hermitian(const CMatrix& x, double tol = TOL_HERM);
bool is_projector(const Operator& p);

// Number of eigenvalues >= 1/2 (a projector's rank).
int projector_rank(const Operator& p);

// True iff x + shift*I admits a Cholesky factorization.
bool psd_within(const CMatrix& x, double shift);

// ---------------------------------------------------------------------------
// Singular value decomposition, m = sum_j sigma_j u_j v_j^dagger, sigma
// descending, min(rows, cols) triplets. Zero singular values leave the
// corresponding u/v columns empty (completion is the Schmidt layer's job).
struct SvdResult {
    std::vector<double> sigma;
    std::vector<std::vector<cdouble>> u;  // length-rows vectors
    std::vector<std::vector<cdouble>> v;  // length-cols vectors
};

SvdResult svd_jacobi(const CMatrix& m);

// ---------------------------------------------------------------------------
// Schmidt form: |psi> = sum_j sqrt(coeffs[j]) basis_a[j] (x) basis_b[j],
// coefficients descending and summing to 1, bases orthonormal. The basis
// lists always hold d = coeffs.size() kets; zero coefficients carry
// deterministically completed vectors (Gram-Schmidt against standard basis
// vectors in index order, first nonzero amplitude phase-fixed real positive).
struct SchmidtForm {
    std::vector<double> coeffs;
    std::vector<Ket> basis_a;
    std::vector<Ket> basis_b;

    int d() const { return static_cast<int>(coeffs.size()); }
    Ket reconstruct() const;
};

// User-facing rule: unequal factor dimensions are handled by embedding the
// smaller side into d = max(dim A, dim B), so the form always has d
// coefficients and d x d bases. With equal dimensions the original factor
// structure of each side is preserved.
SchmidtForm schmidt_decompose(const Ket& psi, int cut);

// Recursion rule (dim A <= dim B required): d = dim A, with the B side
// completed to only d orthonormal vectors inside its own space. This keeps
// operators on the original ambient space, as the multipartite construction
// requires.
SchmidtForm schmidt_for_cut(const Ket& psi, int cut);

// ---------------------------------------------------------------------------
// Factor bookkeeping helpers.

// Collapses the factor list to the two groups around `cut` (metadata only).
Ket regroup(const Ket& k, int cut);

// Zero-pads each factor to the requested dimension (new_dims[i] >= dims[i],
// same factor count).
Ket embed_ket(const Ket& k, const std::vector<int>& new_dims);
Operator embed_operator(const Operator& o, const std::vector<int>& new_dims);
DensityMatrix embed_density(const DensityMatrix& r, const std::vector<int>& new_dims);

// Reorders tensor factors; order[k] = original index of the factor placed at
// position k.
Ket permute_parties(const Ket& k, const std::vector<int>& order);
Operator permute_parties(const Operator& o, const std::vector<int>& order);

// Traces out the listed factors.
Operator partial_trace(const Operator& o, const std::vector<int>& traced);

} // namespace sepstab
