#include "sepstab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sepstab {

using kernels::active;

int dim_product(const std::vector<int>& dims) {
    int p = 1;
    for (int d : dims) {
        if (d <= 0) throw DimensionMismatch("factor dimensions must be positive");
        p *= d;
    }
    return p;
}

namespace {

std::vector<int> make_strides(const std::vector<int>& dims) {
    std::vector<int> s(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
        s[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k) + 1] * dims[static_cast<std::size_t>(k) + 1];
    return s;
}

void decompose_index(int flat, const std::vector<int>& dims, std::vector<int>& digits) {
    digits.resize(dims.size());
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        auto ku = static_cast<std::size_t>(k);
        digits[ku] = flat % dims[ku];
        flat /= dims[ku];
    }
}

} // namespace

// ---------------------------------------------------------------------------
// CMatrix

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

CMatrix matmul(const CMatrix& x, const CMatrix& y) {
    if (x.cols != y.rows) throw DimensionMismatch("matmul: inner dimensions differ");
    CMatrix c(x.rows, y.cols);
    active().gemm_acc(x.rows, x.cols, y.cols, x.a.data(), y.a.data(), c.a.data());
    return c;
}

CMatrix kron(const CMatrix& x, const CMatrix& y) {
    CMatrix out(x.rows * y.rows, x.cols * y.cols);
    for (std::size_t ia = 0; ia < x.rows; ++ia)
        for (std::size_t ib = 0; ib < y.rows; ++ib) {
            cdouble* orow = out.a.data() + (ia * y.rows + ib) * out.cols;
            const cdouble* brow = y.a.data() + ib * y.cols;
            for (std::size_t ja = 0; ja < x.cols; ++ja)
                active().scal(y.cols, x.at(ia, ja), brow, orow + ja * y.cols);
        }
    return out;
}

CMatrix adjoint(const CMatrix& x) {
    CMatrix r(x.cols, x.rows);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) r.at(j, i) = std::conj(x.at(i, j));
    return r;
}

CMatrix mat_add(const CMatrix& x, const CMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DimensionMismatch("mat_add: shape mismatch");
    CMatrix r = x;
    active().axpy(r.a.size(), 1.0, y.a.data(), r.a.data());
    return r;
}

CMatrix mat_sub(const CMatrix& x, const CMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DimensionMismatch("mat_sub: shape mismatch");
    CMatrix r = x;
    active().axpy(r.a.size(), -1.0, y.a.data(), r.a.data());
    return r;
}

CMatrix mat_scale(cdouble s, const CMatrix& x) {
    CMatrix r(x.rows, x.cols);
    active().scal(x.a.size(), s, x.a.data(), r.a.data());
    return r;
}

cdouble mat_trace(const CMatrix& x) {
    cdouble t = 0.0;
    for (std::size_t i = 0; i < std::min(x.rows, x.cols); ++i) t += x.at(i, i);
    return t;
}

double frob_norm(const CMatrix& x) { return std::sqrt(active().norm2(x.a.size(), x.a.data())); }

double frob_dist(const CMatrix& x, const CMatrix& y) { return frob_norm(mat_sub(x, y)); }

double max_abs_diff(const CMatrix& x, const CMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DimensionMismatch("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
    return m;
}

std::vector<cdouble> mat_vec(const CMatrix& m, const std::vector<cdouble>& v) {
    if (m.cols != v.size()) throw DimensionMismatch("mat_vec: shape mismatch");
    std::vector<cdouble> y(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        y[i] = active().dotu(m.cols, m.a.data() + i * m.cols, v.data());
    return y;
}

// ---------------------------------------------------------------------------
// Ket / Operator

Ket::Ket(std::vector<cdouble> amplitudes, std::vector<int> factor_dims)
    : amp(std::move(amplitudes)), dims(std::move(factor_dims)) {
    if (dim_product(dims) != static_cast<int>(amp.size()))
        throw DimensionMismatch("Ket: product(dims) != amplitude count");
    double n = norm();
    if (std::abs(n - 1.0) > TOL_NORM)
        throw NonUnitNorm("Ket: norm " + std::to_string(n) + " deviates from 1");
}

double Ket::norm() const { return std::sqrt(active().norm2(amp.size(), amp.data())); }

Operator::Operator(CMatrix m, std::vector<int> factor_dims)
    : mat(std::move(m)), dims(std::move(factor_dims)) {
    if (mat.rows != mat.cols) throw DimensionMismatch("Operator: matrix not square");
    if (dim_product(dims) != static_cast<int>(mat.rows))
        throw DimensionMismatch("Operator: product(dims) != matrix side");
}

Operator Operator::identity(std::vector<int> factor_dims) {
    int d = dim_product(factor_dims);
    return Operator(CMatrix::identity(static_cast<std::size_t>(d)), std::move(factor_dims));
}

namespace {
void require_same_dims(const Operator& x, const Operator& y, const char* who) {
    if (x.dims != y.dims) throw DimensionMismatch(std::string(who) + ": factor dims differ");
}
} // namespace

Operator op_add(const Operator& x, const Operator& y) {
    require_same_dims(x, y, "op_add");
    return Operator(mat_add(x.mat, y.mat), x.dims);
}

Operator op_sub(const Operator& x, const Operator& y) {
    require_same_dims(x, y, "op_sub");
    return Operator(mat_sub(x.mat, y.mat), x.dims);
}

Operator op_scale(cdouble s, const Operator& x) { return Operator(mat_scale(s, x.mat), x.dims); }

Operator op_mul(const Operator& x, const Operator& y) {
    require_same_dims(x, y, "op_mul");
    return Operator(matmul(x.mat, y.mat), x.dims);
}

Operator op_adjoint(const Operator& x) { return Operator(adjoint(x.mat), x.dims); }

cdouble op_trace(const Operator& x) { return mat_trace(x.mat); }

double frob_dist(const Operator& x, const Operator& y) { return frob_dist(x.mat, y.mat); }

double commutator_norm(const Operator& x, const Operator& y) {
    require_same_dims(x, y, "commutator_norm");
    return frob_dist(matmul(x.mat, y.mat), matmul(y.mat, x.mat));
}

std::vector<cdouble> apply(const Operator& m, const Ket& k) {
    if (m.dim() != k.dim()) throw DimensionMismatch("apply: dimension mismatch");
    return mat_vec(m.mat, k.amp);
}

Operator outer(const Ket& k) {
    std::size_t n = k.amp.size();
    CMatrix m(n, n);
    std::vector<cdouble> conj_amp(n);
    for (std::size_t j = 0; j < n; ++j) conj_amp[j] = std::conj(k.amp[j]);
    for (std::size_t i = 0; i < n; ++i)
        active().scal(n, k.amp[i], conj_amp.data(), m.a.data() + i * n);
    return Operator(std::move(m), k.dims);
}

Ket tensor(const Ket& x, const Ket& y) {
    std::size_t nx = x.amp.size(), ny = y.amp.size();
    std::vector<cdouble> out(nx * ny);
    for (std::size_t i = 0; i < nx; ++i)
        active().scal(ny, x.amp[i], y.amp.data(), out.data() + i * ny);
    std::vector<int> dims = x.dims;
    dims.insert(dims.end(), y.dims.begin(), y.dims.end());
    return Ket(std::move(out), std::move(dims));
}

Operator tensor(const Operator& x, const Operator& y) {
    std::size_t na = x.mat.rows, nb = y.mat.rows;
    CMatrix m(na * nb, na * nb);
    for (std::size_t ia = 0; ia < na; ++ia)
        for (std::size_t ib = 0; ib < nb; ++ib) {
            cdouble* orow = m.a.data() + (ia * nb + ib) * m.cols;
            const cdouble* brow = y.mat.a.data() + ib * nb;
            for (std::size_t ja = 0; ja < na; ++ja)
                active().scal(nb, x.mat.at(ia, ja), brow, orow + ja * nb);
        }
    std::vector<int> dims = x.dims;
    dims.insert(dims.end(), y.dims.begin(), y.dims.end());
    return Operator(std::move(m), std::move(dims));
}

cdouble inner(const Ket& x, const Ket& y) {
    if (x.dim() != y.dim()) throw DimensionMismatch("inner: dimension mismatch");
    return active().dotc(x.amp.size(), x.amp.data(), y.amp.data());
}

bool equal_up_to_phase(const Ket& x, const Ket& y, double tol) {
    return std::abs(inner(x, y)) >= 1.0 - tol;
}

// ---------------------------------------------------------------------------
// DensityMatrix

bool psd_within(const CMatrix& x, double shift) {
    // Cholesky of x + shift*I; success <=> min eigenvalue > -shift (up to
    // rounding at the boundary).
    std::size_t n = x.rows;
    CMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = x.at(j, j).real() + shift;
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l.at(j, k));
        if (!(d > 0.0)) return false;
        double ljj = std::sqrt(d);
        l.at(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cdouble s = x.at(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l.at(i, k) * std::conj(l.at(j, k));
            l.at(i, j) = s / ljj;
        }
    }
    return true;
}

bool is_hermitian(const CMatrix& x, double tol) {
    if (x.rows != x.cols) return false;
    return frob_dist(x, adjoint(x)) <= tol;
}

DensityMatrix DensityMatrix::from_operator(Operator o) {
    if (!is_hermitian(o.mat, TOL_HERM))
        throw NotDensityMatrix("density matrix: not Hermitian within TOL_HERM");
    cdouble tr = op_trace(o);
    if (std::abs(tr - cdouble{1.0, 0.0}) > TOL_TRACE)
        throw NotDensityMatrix("density matrix: trace deviates from 1");
    if (!psd_within(o.mat, TOL_PSD))
        throw NotDensityMatrix("density matrix: eigenvalue below -TOL_PSD");
    DensityMatrix r;
    r.op = std::move(o);
    return r;
}

DensityMatrix DensityMatrix::pure(const Ket& k) {
    // valid by construction, skip the O(n^3) check
    DensityMatrix r;
    r.op = outer(k);
    return r;
}

DensityMatrix DensityMatrix::maximally_mixed(std::vector<int> dims) {
    int d = dim_product(dims);
    Operator o = Operator::identity(std::move(dims));
    o = op_scale(1.0 / d, o);
    DensityMatrix r;
    r.op = std::move(o);
    return r;
}

DensityMatrix mix(double a, const DensityMatrix& x, double b, const DensityMatrix& y) {
    return DensityMatrix::from_operator(op_add(op_scale(a, x.op), op_scale(b, y.op)));
}

// ---------------------------------------------------------------------------
// Hermitian Jacobi eigendecomposition
//
// Cyclic complex Jacobi: for each off-diagonal h = H[p][q] build the unitary
//   R = [[c, -s*u], [s*conj(u), c]],   u = h/|h|
// with the classic stable choice t = sign(tau)/(|tau| + sqrt(1+tau^2)),
// tau = (H[p][p]-H[q][q])/(2|h|), c = 1/sqrt(1+t^2), s = t*c, which zeroes
// the (p,q) entry of R^dagger H R. Quadratic convergence, high relative
// accuracy; ample for desk-scale matrices.

namespace {

double offdiag_sq(const CMatrix& h) {
    double s = 0.0;
    for (std::size_t p = 0; p < h.rows; ++p)
        for (std::size_t q = p + 1; q < h.cols; ++q) s += std::norm(h.at(p, q));
    return 2.0 * s;
}

struct Rotation {
    double c;
    double s;         // signed
    cdouble su;       // s * u
    cdouble su_conj;  // s * conj(u)
};

Rotation make_rotation(double app, double aqq, cdouble h) {
    double ah = std::abs(h);
    cdouble u = h / ah;
    double tau = (app - aqq) / (2.0 * ah);
    double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    double c = 1.0 / std::sqrt(1.0 + t * t);
    double s = t * c;
    return {c, s, s * u, s * std::conj(u)};
}

} // namespace

EigResult eig_hermitian(const CMatrix& hin) {
    if (!is_hermitian(hin, TOL_HERM))
        throw NotHermitian("eig_hermitian: matrix not Hermitian within TOL_HERM");
    std::size_t n = hin.rows;
    // symmetrize residual rounding away
    CMatrix h = mat_scale(0.5, mat_add(hin, adjoint(hin)));
    CMatrix v = CMatrix::identity(n);

    const double scale = std::max(1.0, frob_norm(h));
    const double stop = 1e-14 * scale;

    for (int sweep = 0; sweep < 100 && offdiag_sq(h) > stop * stop; ++sweep) {
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                cdouble hpq = h.at(p, q);
                double app = h.at(p, p).real(), aqq = h.at(q, q).real();
                if (std::abs(hpq) <= 1e-300 ||
                    std::abs(hpq) <= 1e-18 * (std::abs(app) + std::abs(aqq)))
                    continue;
                Rotation r = make_rotation(app, aqq, hpq);
                double ah = std::abs(hpq);
                // column rotation on h and v
                for (std::size_t i = 0; i < n; ++i) {
                    cdouble hp = h.at(i, p), hq = h.at(i, q);
                    h.at(i, p) = r.c * hp + r.su_conj * hq;
                    h.at(i, q) = -r.su * hp + r.c * hq;
                    cdouble vp = v.at(i, p), vq = v.at(i, q);
                    v.at(i, p) = r.c * vp + r.su_conj * vq;
                    v.at(i, q) = -r.su * vp + r.c * vq;
                }
                // row rotation on h
                for (std::size_t j = 0; j < n; ++j) {
                    cdouble hp = h.at(p, j), hq = h.at(q, j);
                    h.at(p, j) = r.c * hp + r.su * hq;
                    h.at(q, j) = -r.su_conj * hp + r.c * hq;
                }
                double cs2 = 2.0 * r.c * r.s * ah;
                h.at(p, p) = r.c * r.c * app + r.s * r.s * aqq + cs2;
                h.at(q, q) = r.s * r.s * app + r.c * r.c * aqq - cs2;
                h.at(p, q) = 0.0;
                h.at(q, p) = 0.0;
            }
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return h.at(a, a).real() > h.at(b, b).real();
    });

    EigResult res;
    res.values.resize(n);
    res.vectors = CMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        res.values[j] = h.at(idx[j], idx[j]).real();
        // deterministic phase: first non-negligible entry real positive
        cdouble phase = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            cdouble e = v.at(i, idx[j]);
            if (std::abs(e) > 1e-9) {
                phase = std::conj(e) / std::abs(e);
                break;
            }
        }
        for (std::size_t i = 0; i < n; ++i) res.vectors.at(i, j) = v.at(i, idx[j]) * phase;
    }
    return res;
}

EigResult eig_hermitian(const Operator& h) { return eig_hermitian(h.mat); }

std::vector<cdouble> EigResult::vector(std::size_t j) const {
    std::vector<cdouble> col(vectors.rows);
    for (std::size_t i = 0; i < vectors.rows; ++i) col[i] = vectors.at(i, j);
    return col;
}

double min_eigenvalue(const Operator& h) {
    EigResult e = eig_hermitian(h);
    return e.values.back();
}

bool is_projector(const Operator& p) {
    if (!is_hermitian(p.mat, TOL_HERM)) return false;
    return frob_dist(matmul(p.mat, p.mat), p.mat) <= TOL_PROJ;
}

int projector_rank(const Operator& p) {
    EigResult e = eig_hermitian(p);
    int r = 0;
    for (double v : e.values)
        if (v >= 0.5) ++r;
    return r;
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD
//
// Works on the column Gram matrix: for columns x, y the 2x2 Gram
// [[|x|^2, <x,y>], [<x,y>*, |y|^2]] is Hermitian, and the same rotation as
// above makes the pair orthogonal. At convergence column norms are the
// singular values. Chosen over eig(M^dagger M) for its accuracy on small
// singular values.

SvdResult svd_jacobi(const CMatrix& m) {
    if (m.rows < m.cols) {
        SvdResult t = svd_jacobi(adjoint(m));
        std::swap(t.u, t.v);
        return t;
    }
    const std::size_t rows = m.rows, cols = m.cols;
    // w rows are columns of m; vt rows are columns of the accumulated V
    CMatrix w(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) w.at(j, i) = m.at(i, j);
    CMatrix vt = CMatrix::identity(cols);

    const auto& k = active();
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool converged = true;
        for (std::size_t p = 0; p < cols; ++p)
            for (std::size_t q = p + 1; q < cols; ++q) {
                cdouble* wp = w.a.data() + p * rows;
                cdouble* wq = w.a.data() + q * rows;
                double a = k.norm2(rows, wp), b = k.norm2(rows, wq);
                if (a <= 1e-300 || b <= 1e-300) continue;
                cdouble h = k.dotc(rows, wp, wq);
                if (std::abs(h) <= 1e-14 * std::sqrt(a * b)) continue;
                converged = false;
                Rotation r = make_rotation(a, b, h);
                for (std::size_t i = 0; i < rows; ++i) {
                    cdouble x = wp[i], y = wq[i];
                    wp[i] = r.c * x + r.su_conj * y;
                    wq[i] = -r.su * x + r.c * y;
                }
                cdouble* vp = vt.a.data() + p * cols;
                cdouble* vq = vt.a.data() + q * cols;
                for (std::size_t i = 0; i < cols; ++i) {
                    cdouble x = vp[i], y = vq[i];
                    vp[i] = r.c * x + r.su_conj * y;
                    vq[i] = -r.su * x + r.c * y;
                }
            }
        if (converged) break;
    }

    std::vector<double> sigma(cols);
    for (std::size_t j = 0; j < cols; ++j) sigma[j] = std::sqrt(k.norm2(rows, w.a.data() + j * rows));
    std::vector<std::size_t> idx(cols);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    SvdResult res;
    res.sigma.resize(cols);
    res.u.resize(cols);
    res.v.resize(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        std::size_t src = idx[j];
        res.sigma[j] = sigma[src];
        if (sigma[src] > 1e-12) {
            res.u[j].assign(w.a.begin() + static_cast<std::ptrdiff_t>(src * rows),
                            w.a.begin() + static_cast<std::ptrdiff_t>((src + 1) * rows));
            for (auto& e : res.u[j]) e /= sigma[src];
            res.v[j].assign(vt.a.begin() + static_cast<std::ptrdiff_t>(src * cols),
                            vt.a.begin() + static_cast<std::ptrdiff_t>((src + 1) * cols));
        } else {
            res.sigma[j] = 0.0;  // treated as a zero coefficient; vectors completed later
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Schmidt decomposition

namespace {

// Deterministic completion: Gram-Schmidt the standard basis vectors, in index
// order, against the already-fixed vectors; accept when the residual keeps
// more than half its norm.
void complete_orthonormal(std::vector<std::vector<cdouble>>& vecs, std::size_t ambient) {
    std::vector<std::size_t> missing;
    for (std::size_t j = 0; j < vecs.size(); ++j)
        if (vecs[j].empty()) missing.push_back(j);
    std::size_t cand = 0;
    for (std::size_t slot : missing) {
        for (; cand < ambient; ++cand) {
            std::vector<cdouble> w(ambient, 0.0);
            w[cand] = 1.0;
            for (const auto& f : vecs) {
                if (f.empty()) continue;
                cdouble ov = kernels::active().dotc(ambient, f.data(), w.data());
                for (std::size_t i = 0; i < ambient; ++i) w[i] -= ov * f[i];
            }
            double n2 = kernels::active().norm2(ambient, w.data());
            if (n2 > 0.25) {
                double inv = 1.0 / std::sqrt(n2);
                for (auto& e : w) e *= inv;
                vecs[slot] = std::move(w);
                ++cand;
                break;
            }
        }
        if (vecs[slot].empty())
            throw DimensionMismatch("basis completion ran out of candidates");
    }
}

cdouble leading_phase(const std::vector<cdouble>& v) {
    for (const cdouble& e : v)
        if (std::abs(e) > 1e-9) return std::conj(e) / std::abs(e);
    return 1.0;
}

std::size_t first_nonzero_index(const std::vector<cdouble>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > 1e-9) return i;
    return v.size();
}

struct SplitDims {
    std::vector<int> a, b;
    int da, db;
};

SplitDims split_dims(const Ket& psi, int cut) {
    if (cut <= 0 || cut >= static_cast<int>(psi.dims.size()))
        throw DimensionMismatch("cut must split the factors into two nonempty groups");
    SplitDims s;
    s.a.assign(psi.dims.begin(), psi.dims.begin() + cut);
    s.b.assign(psi.dims.begin() + cut, psi.dims.end());
    s.da = dim_product(s.a);
    s.db = dim_product(s.b);
    return s;
}

SchmidtForm schmidt_core(const Ket& psi, const SplitDims& sd, int d, bool embed_a, bool embed_b) {
    if (std::abs(psi.norm() - 1.0) > TOL_NORM)
        throw NonUnitNorm("schmidt_decompose: state not normalized");

    CMatrix m(static_cast<std::size_t>(sd.da), static_cast<std::size_t>(sd.db));
    m.a = psi.amp;
    SvdResult sv = svd_jacobi(m);

    const std::size_t dim_a = embed_a ? static_cast<std::size_t>(d) : static_cast<std::size_t>(sd.da);
    const std::size_t dim_b = embed_b ? static_cast<std::size_t>(d) : static_cast<std::size_t>(sd.db);

    std::vector<double> lam(static_cast<std::size_t>(d), 0.0);
    std::vector<std::vector<cdouble>> av(static_cast<std::size_t>(d));
    std::vector<std::vector<cdouble>> bv(static_cast<std::size_t>(d));
    for (std::size_t j = 0; j < sv.sigma.size() && j < lam.size(); ++j) {
        if (sv.sigma[j] <= 0.0) break;
        lam[j] = sv.sigma[j] * sv.sigma[j];
        av[j].assign(dim_a, 0.0);
        std::copy(sv.u[j].begin(), sv.u[j].end(), av[j].begin());
        bv[j].assign(dim_b, 0.0);
        for (std::size_t i = 0; i < sv.v[j].size(); ++i) bv[j][i] = std::conj(sv.v[j][i]);
    }

    // stable order inside degenerate groups: by first nonzero amplitude of
    // the A-side vector
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < lam.size() && !av[j].empty(); ++j) idx.push_back(j);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        if (std::abs(lam[x] - lam[y]) > 1e-12 * (1.0 + lam[x])) return lam[x] > lam[y];
        return first_nonzero_index(av[x]) < first_nonzero_index(av[y]);
    });
    {
        std::vector<double> lam2 = lam;
        std::vector<std::vector<cdouble>> av2 = av, bv2 = bv;
        for (std::size_t j = 0; j < idx.size(); ++j) {
            lam[j] = lam2[idx[j]];
            av[j] = std::move(av2[idx[j]]);
            bv[j] = std::move(bv2[idx[j]]);
        }
    }

    // joint phase fix for paired vectors, then independent completion
    for (std::size_t j = 0; j < av.size(); ++j) {
        if (av[j].empty()) continue;
        cdouble ph = leading_phase(av[j]);
        for (auto& e : av[j]) e *= ph;
        cdouble phc = std::conj(ph);
        for (auto& e : bv[j]) e *= phc;
    }
    complete_orthonormal(av, dim_a);
    complete_orthonormal(bv, dim_b);
    for (std::size_t j = 0; j < av.size(); ++j) {
        if (lam[j] > 0.0) continue;
        cdouble pa = leading_phase(av[j]);
        for (auto& e : av[j]) e *= pa;
        cdouble pb = leading_phase(bv[j]);
        for (auto& e : bv[j]) e *= pb;
    }

    SchmidtForm f;
    f.coeffs = std::move(lam);
    std::vector<int> adims = embed_a ? std::vector<int>{d} : sd.a;
    std::vector<int> bdims = embed_b ? std::vector<int>{d} : sd.b;
    for (std::size_t j = 0; j < av.size(); ++j) {
        f.basis_a.emplace_back(std::move(av[j]), adims);
        f.basis_b.emplace_back(std::move(bv[j]), bdims);
    }
    return f;
}

} // namespace

SchmidtForm schmidt_decompose(const Ket& psi, int cut) {
    SplitDims sd = split_dims(psi, cut);
    int d = std::max(sd.da, sd.db);
    return schmidt_core(psi, sd, d, sd.da < d, sd.db < d);
}

SchmidtForm schmidt_for_cut(const Ket& psi, int cut) {
    SplitDims sd = split_dims(psi, cut);
    if (sd.da > sd.db)
        throw DimensionMismatch(
            "schmidt_for_cut: first group larger than the rest; reorder parties or use "
            "schmidt_decompose");
    return schmidt_core(psi, sd, sd.da, false, false);
}

Ket SchmidtForm::reconstruct() const {
    Ket acc = tensor(basis_a[0], basis_b[0]);
    std::vector<cdouble> amp(acc.amp.size(), 0.0);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        Ket term = tensor(basis_a[j], basis_b[j]);
        kernels::active().axpy(amp.size(), std::sqrt(coeffs[j]), term.amp.data(), amp.data());
    }
    return Ket(std::move(amp), acc.dims);
}

// ---------------------------------------------------------------------------
// Factor bookkeeping

Ket regroup(const Ket& k, int cut) {
    SplitDims sd = split_dims(k, cut);
    Ket r = k;
    r.dims = {sd.da, sd.db};
    return r;
}

namespace {
std::vector<int> embedded_flat_map(const std::vector<int>& dims, const std::vector<int>& new_dims) {
    if (dims.size() != new_dims.size())
        throw DimensionMismatch("embed: factor count differs");
    for (std::size_t i = 0; i < dims.size(); ++i)
        if (new_dims[i] < dims[i]) throw DimensionMismatch("embed: target factor smaller");
    int n = dim_product(dims);
    std::vector<int> ns = make_strides(new_dims);
    std::vector<int> map(static_cast<std::size_t>(n));
    std::vector<int> digits;
    for (int flat = 0; flat < n; ++flat) {
        decompose_index(flat, dims, digits);
        int nf = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) nf += digits[k] * ns[k];
        map[static_cast<std::size_t>(flat)] = nf;
    }
    return map;
}
} // namespace

Ket embed_ket(const Ket& k, const std::vector<int>& new_dims) {
    std::vector<int> map = embedded_flat_map(k.dims, new_dims);
    std::vector<cdouble> amp(static_cast<std::size_t>(dim_product(new_dims)), 0.0);
    for (std::size_t i = 0; i < map.size(); ++i) amp[static_cast<std::size_t>(map[i])] = k.amp[i];
    return Ket(std::move(amp), new_dims);
}

Operator embed_operator(const Operator& o, const std::vector<int>& new_dims) {
    std::vector<int> map = embedded_flat_map(o.dims, new_dims);
    std::size_t nn = static_cast<std::size_t>(dim_product(new_dims));
    CMatrix m(nn, nn);
    for (std::size_t i = 0; i < map.size(); ++i)
        for (std::size_t j = 0; j < map.size(); ++j)
            m.at(static_cast<std::size_t>(map[i]), static_cast<std::size_t>(map[j])) =
                o.mat.at(i, j);
    return Operator(std::move(m), new_dims);
}

DensityMatrix embed_density(const DensityMatrix& r, const std::vector<int>& new_dims) {
    DensityMatrix out;
    out.op = embed_operator(r.op, new_dims);
    return out;
}

namespace {
std::vector<int> permutation_flat_map(const std::vector<int>& dims, const std::vector<int>& order) {
    std::size_t n = dims.size();
    if (order.size() != n) throw InvalidOrder("party order: wrong length");
    std::vector<bool> seen(n, false);
    for (int o : order) {
        if (o < 0 || o >= static_cast<int>(n) || seen[static_cast<std::size_t>(o)])
            throw InvalidOrder("party order: not a permutation");
        seen[static_cast<std::size_t>(o)] = true;
    }
    std::vector<int> new_dims(n);
    for (std::size_t k = 0; k < n; ++k) new_dims[k] = dims[static_cast<std::size_t>(order[k])];
    std::vector<int> old_strides = make_strides(dims);
    int total = dim_product(dims);
    std::vector<int> map(static_cast<std::size_t>(total));
    std::vector<int> digits;
    for (int flat = 0; flat < total; ++flat) {
        decompose_index(flat, new_dims, digits);
        int of = 0;
        for (std::size_t k = 0; k < n; ++k)
            of += digits[k] * old_strides[static_cast<std::size_t>(order[k])];
        map[static_cast<std::size_t>(flat)] = of;  // new flat -> old flat
    }
    return map;
}
} // namespace

Ket permute_parties(const Ket& k, const std::vector<int>& order) {
    std::vector<int> map = permutation_flat_map(k.dims, order);
    std::vector<int> new_dims(k.dims.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        new_dims[i] = k.dims[static_cast<std::size_t>(order[i])];
    std::vector<cdouble> amp(k.amp.size());
    for (std::size_t i = 0; i < amp.size(); ++i) amp[i] = k.amp[static_cast<std::size_t>(map[i])];
    return Ket(std::move(amp), std::move(new_dims));
}

Operator permute_parties(const Operator& o, const std::vector<int>& order) {
    std::vector<int> map = permutation_flat_map(o.dims, order);
    std::vector<int> new_dims(o.dims.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        new_dims[i] = o.dims[static_cast<std::size_t>(order[i])];
    std::size_t n = o.mat.rows;
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m.at(i, j) = o.mat.at(static_cast<std::size_t>(map[i]), static_cast<std::size_t>(map[j]));
    return Operator(std::move(m), std::move(new_dims));
}

Operator partial_trace(const Operator& o, const std::vector<int>& traced) {
    std::size_t n = o.dims.size();
    std::vector<bool> is_traced(n, false);
    for (int t : traced) {
        if (t < 0 || t >= static_cast<int>(n)) throw DimensionMismatch("partial_trace: bad factor");
        is_traced[static_cast<std::size_t>(t)] = true;
    }
    std::vector<int> keep_dims, trace_dims;
    std::vector<std::size_t> keep_idx, trace_idx;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_traced[i]) {
            trace_dims.push_back(o.dims[i]);
            trace_idx.push_back(i);
        } else {
            keep_dims.push_back(o.dims[i]);
            keep_idx.push_back(i);
        }
    }
    if (keep_dims.empty()) throw DimensionMismatch("partial_trace: nothing kept");
    std::vector<int> strides = make_strides(o.dims);
    int dk = dim_product(keep_dims);
    int dt = trace_dims.empty() ? 1 : dim_product(trace_dims);
    CMatrix m(static_cast<std::size_t>(dk), static_cast<std::size_t>(dk));
    std::vector<int> kd, ld, td;
    for (int r = 0; r < dk; ++r) {
        decompose_index(r, keep_dims, kd);
        for (int c = 0; c < dk; ++c) {
            decompose_index(c, keep_dims, ld);
            cdouble s = 0.0;
            for (int t = 0; t < dt; ++t) {
                decompose_index(t, trace_dims, td);
                int row = 0, col = 0;
                for (std::size_t i = 0; i < keep_idx.size(); ++i) {
                    row += kd[i] * strides[keep_idx[i]];
                    col += ld[i] * strides[keep_idx[i]];
                }
                for (std::size_t i = 0; i < trace_idx.size(); ++i) {
                    row += td[i] * strides[trace_idx[i]];
                    col += td[i] * strides[trace_idx[i]];
                }
                s += o.mat.at(static_cast<std::size_t>(row), static_cast<std::size_t>(col));
            }
            m.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = s;
        }
    }
    return Operator(std::move(m), keep_dims);
}

} // namespace sepstab
