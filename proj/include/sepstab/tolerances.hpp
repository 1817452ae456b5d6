#pragma once

namespace sepstab {

// Absolute numerical tolerances. Double precision at total Hilbert dimension
// <= ~4096 keeps rounding well below these.
constexpr double TOL_NORM  = 1e-10;  // state normalization
constexpr double TOL_HERM  = 1e-10;  // Hermiticity, Frobenius
constexpr double TOL_TRACE = 1e-10;  // unit trace
constexpr double TOL_PROJ  = 1e-9;   // idempotence, Frobenius
constexpr double TOL_ORTHO = 1e-9;   // basis orthonormality
constexpr double TOL_RECON = 1e-9;   // decomposition reconstruction
constexpr double TOL_PSD   = 1e-9;   // eigenvalue negativity slack
constexpr double TOL_STAB  = 1e-9;   // stabilizer identities, Frobenius
constexpr double TOL_CPTP  = 1e-9;   // Kraus completeness

// Desk-scale cap on the total Hilbert dimension (overridable via the
// SEPSTAB_DIM_CAP environment variable in the CLI).
constexpr int DEFAULT_DIM_CAP = 4096;

} // namespace sepstab
