#pragma once

// Numerical tolerances shared by every module.

namespace qlab::tol {

inline constexpr double hermiticity = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double reconstruction = 1e-10;
inline constexpr double unitarity = 1e-10;
inline constexpr double completeness = 1e-10;
// Eigenvalues in [-psd_clip, 0) are treated as zero; anything more negative
// is an invariant violation.
inline constexpr double psd_clip = 1e-10;
inline constexpr double jacobi_off_diagonal = 1e-14;
inline constexpr double product_state = 1e-9;
inline constexpr double correlation_rank = 1e-10;
inline constexpr double kraus_prune = 1e-12;
inline constexpr double normalization = 1e-10;

}  // namespace qlab::tol
