#pragma once

#include <cstddef>
#include <string>

#include "ergoloop/matrix.hpp"

namespace ergoloop {

/// Discrete-time linear state-space block (controller or filter):
///   x(k+1) = A x(k) + B u(k)
///   y(k)   = C x(k) + D u(k)
/// with optional periodic updating: between update instants both the internal
/// state and the emitted output are held frozen (zero-order hold).
struct LinearBlock {
    Matrix A, B, C, D;
    Vec x;
    std::size_t update_period = 1;
    Vec held_output;
    std::string name;

    std::size_t state_dim() const { return A.rows(); }
    std::size_t input_dim() const { return B.cols(); }
    std::size_t output_dim() const { return C.rows(); }

    void validate() const;
    void reset(Vec x0);
};

/// One tick. At steps with k % update_period == 0 the block computes
/// y = C x + D u, advances x, and latches y; otherwise it returns the latched
/// output and leaves the state untouched.
Vec block_step(LinearBlock& block, const Vec& input, std::size_t k);

/// State-space realization of the scalar recurrence
///   pi(k) = beta * pi(k-1) + kappa * (e(k) - alpha * e(k-1)),
/// with state [pi(k-1); e(k-1)]. Eigenvalues are {beta, 0}.
LinearBlock realize_toy_controller(double alpha, double beta, double kappa,
                                   std::size_t period = 1);

/// PI controller pi(k) = Kp e(k) + Ki (x(k) + e(k)) with integrator state
/// x(k+1) = x(k) + e(k). The state matrix has spectral radius exactly 1.
LinearBlock build_pi(double kp, double ki);

/// Lag approximant of the PI controller: the integrator pole moves to rho,
///   x(k+1) = rho x(k) + e(k),  pi(k) = Kp e(k) + Ki (rho x(k) + e(k)).
/// Requires |rho| < 1 so the block can pass Schur certification.
LinearBlock build_lag(double kp, double ki, double rho);

/// Identity-with-one-step-delay filter: y_hat(k) = y(k-1).
LinearBlock make_delay_filter();

}  // namespace ergoloop
