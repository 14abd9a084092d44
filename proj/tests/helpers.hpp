#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "ergoloop/matrix.hpp"
#include "ergoloop/spectral.hpp"

#ifdef ERGOLOOP_HAVE_EIGEN_ORACLE
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#endif

namespace ergotest {

using ergoloop::Matrix;
using ergoloop::Vec;

inline Matrix random_matrix(std::mt19937_64& gen, std::size_t n, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = dist(gen);
    return m;
}

// Random matrix with spectral radius scaled to the requested value.
inline Matrix random_matrix_with_radius(std::mt19937_64& gen, std::size_t n, double target_radius);

// Greedy nearest-neighbour multiset match; returns the largest pairing error.
inline double multiset_match_error(std::vector<std::complex<double>> a,
                                   std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) return 1e300;
    double worst = 0.0;
    for (const auto& x : a) {
        std::size_t best = 0;
        double best_d = 1e300;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double d = std::abs(x - b[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        worst = std::max(worst, best_d);
        b.erase(b.begin() + static_cast<long>(best));
    }
    return worst;
}

#ifdef ERGOLOOP_HAVE_EIGEN_ORACLE
// Independent eigenvalue oracle for [DERIVED] expectations.
inline std::vector<std::complex<double>> oracle_eigenvalues(const Matrix& m) {
    Eigen::MatrixXd em(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) em(static_cast<long>(i), static_cast<long>(j)) = m(i, j);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(em, false);
    std::vector<std::complex<double>> out;
    for (long i = 0; i < solver.eigenvalues().size(); ++i) out.push_back(solver.eigenvalues()[i]);
    return out;
}

inline double oracle_spectral_radius(const Matrix& m) {
    double rho = 0.0;
    for (const auto& l : oracle_eigenvalues(m)) rho = std::max(rho, std::abs(l));
    return rho;
}

// Largest singular value via Eigen's SVD; independent route to the 2-norm.
inline double oracle_norm2(const Matrix& m) {
    Eigen::MatrixXd em(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) em(static_cast<long>(i), static_cast<long>(j)) = m(i, j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(em);
    return svd.singularValues()(0);
}
#endif

inline Matrix random_matrix_with_radius(std::mt19937_64& gen, std::size_t n, double target_radius) {
    Matrix m = random_matrix(gen, n);
    const double rho = ergoloop::spectral_radius(m);
    if (rho == 0.0) return m;
    return (target_radius / rho) * m;
}

}  // namespace ergotest
