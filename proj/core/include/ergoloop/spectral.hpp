#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "ergoloop/matrix.hpp"

namespace ergoloop {

/// All eigenvalues of a square matrix, in no particular order.
///
/// Self-contained solver: balancing, Householder reduction to upper
/// Hessenberg form, then Francis double-shift QR with deflation. Accurate to
/// better than 1e-10 relative for the well-conditioned spectra this toolkit
/// certifies (n up to a few hundred).
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

/// max |lambda| over the spectrum. Throws DimensionError on non-square input.
double spectral_radius(const Matrix& m);

struct SchurResult {
    bool verdict;   // spectral radius < 1 - tol
    double margin;  // 1 - spectral radius (negative when outside the unit disc)
};

/// Strict Schur-stability test with tolerance tol in (0, 1).
SchurResult is_schur(const Matrix& m, double tol = 1e-9);

/// Induced 2-norm, computed as sqrt(spectral_radius(m^T m)).
double induced_norm2(const Matrix& m);

/// Smallest k <= m_max with ||m^k||_2 < 1, or nullopt if no power within
/// m_max contracts (also nullopt if powers overflow, which implies divergence).
std::optional<std::size_t> power_contraction_order(const Matrix& m, std::size_t m_max = 10000);

/// Existence-only variant: true iff some dyadic power m^(2^j), j <= max_squarings,
/// has 2-norm below 1. Sound for Schur matrices of any size; used where the
/// exact smallest order would be needlessly expensive.
bool contracts_under_squaring(const Matrix& m, std::size_t max_squarings = 24);

}  // namespace ergoloop
