#include "ergoloop/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ergoloop {

namespace {

void require_square(const Matrix& m, const char* op) {
    if (!m.square())
        throw DimensionError(std::string(op) + " requires a square matrix, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

// Diagonal similarity scaling by powers of 2 to equalize row/column norms.
// Leaves the spectrum untouched, improves QR accuracy on badly scaled input.
void balance_in_place(Matrix& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0;
    constexpr double radix_sq = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix_sq;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix_sq;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= ginv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Householder similarity reduction to upper Hessenberg form, in place.
void hessenberg_in_place(Matrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    Vec v(n, 0.0);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += a(i, k) * a(i, k);
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const double x0 = a(k + 1, k);
        const double alpha = (x0 >= 0.0) ? -xnorm : xnorm;
        double vnorm_sq = 0.0;
        v[k + 1] = x0 - alpha;
        vnorm_sq += v[k + 1] * v[k + 1];
        for (std::size_t i = k + 2; i < n; ++i) {
            v[i] = a(i, k);
            vnorm_sq += v[i] * v[i];
        }
        if (vnorm_sq == 0.0) continue;
        const double vnorm = std::sqrt(vnorm_sq);
        for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;
        // Left: A <- (I - 2vv^T) A on rows k+1.., columns k..
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
            s *= 2.0;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        // Right: A <- A (I - 2vv^T) on columns k+1..
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
        a(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr lineage).
// Destroys `a`, returns the eigenvalues.
std::vector<std::complex<double>> hqr_eigenvalues(Matrix& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<std::complex<double>> eig;
    eig.reserve(static_cast<std::size_t>(n));
    const double eps = std::numeric_limits<double>::epsilon();

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    if (anorm == 0.0) {
        eig.assign(static_cast<std::size_t>(n), {0.0, 0.0});
        return eig;
    }

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l > 0; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                eig.emplace_back(x + t, 0.0);
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + std::copysign(z, p);
                        eig.emplace_back(x + z, 0.0);
                        eig.emplace_back(z != 0.0 ? x - w / z : x + z, 0.0);
                    } else {
                        eig.emplace_back(x + p, z);
                        eig.emplace_back(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if (its == 30)
                        throw std::runtime_error("QR eigenvalue iteration failed to converge");
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0, s = 0.0;
                    if (its == 10 || its == 20) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v =
                            std::abs(p) *
                            (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = a(k + 2, k - 1);
                            double x2 = std::abs(p) + std::abs(q) + std::abs(r);
                            x = x2;
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            double pp = a(k, j) + q * a(k + 1, j);
                            if (k + 1 != nn) {
                                pp += r * a(k + 2, j);
                                a(k + 2, j) -= pp * z;
                            }
                            a(k + 1, j) -= pp * y;
                            a(k, j) -= pp * x;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            double pp = x * a(i, k) + y * a(i, k + 1);
                            if (k + 1 != nn) {
                                pp += z * a(i, k + 2);
                                a(i, k + 2) -= pp * r;
                            }
                            a(i, k + 1) -= pp * q;
                            a(i, k) -= pp;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    return eig;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
    require_square(m, "eigenvalues");
    if (m.rows() == 0) return {};
    if (m.rows() == 1) return {{m(0, 0), 0.0}};
    Matrix work = m;
    balance_in_place(work);
    hessenberg_in_place(work);
    return hqr_eigenvalues(work);
}

double spectral_radius(const Matrix& m) {
    require_square(m, "spectral_radius");
    double rho = 0.0;
    for (const auto& lambda : eigenvalues(m)) rho = std::max(rho, std::abs(lambda));
    return rho;
}

SchurResult is_schur(const Matrix& m, double tol) {
    if (tol <= 0.0 || tol >= 1.0) throw std::invalid_argument("Schur tolerance must be in (0, 1)");
    const double rho = spectral_radius(m);
    return {rho < 1.0 - tol, 1.0 - rho};
}

double induced_norm2(const Matrix& m) {
    const Matrix g = m.transpose() * m;
    return std::sqrt(std::max(0.0, spectral_radius(g)));
}

std::optional<std::size_t> power_contraction_order(const Matrix& m, std::size_t m_max) {
    require_square(m, "power_contraction_order");
    constexpr double overflow_guard = 1e100;
    Matrix power = m;
    for (std::size_t k = 1; k <= m_max; ++k) {
        if (power.max_abs() > overflow_guard) return std::nullopt;
        if (induced_norm2(power) < 1.0) return k;
        if (k < m_max) power = power * m;
    }
    return std::nullopt;
}

bool contracts_under_squaring(const Matrix& m, std::size_t max_squarings) {
    require_square(m, "contracts_under_squaring");
    constexpr double overflow_guard = 1e100;
    Matrix power = m;
    for (std::size_t j = 0; j <= max_squarings; ++j) {
        if (power.max_abs() > overflow_guard) return false;
        if (induced_norm2(power) < 1.0) return true;
        power = power * power;
    }
    return false;
}

}  // namespace ergoloop
