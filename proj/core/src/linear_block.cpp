#include "ergoloop/linear_block.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ergoloop {

void LinearBlock::validate() const {
    if (!A.square()) throw DimensionError("block '" + name + "': A must be square");
    if (B.rows() != A.rows()) throw DimensionError("block '" + name + "': B row count must match A");
    if (C.cols() != A.cols()) throw DimensionError("block '" + name + "': C column count must match A");
    if (D.rows() != C.rows() || D.cols() != B.cols())
        throw DimensionError("block '" + name + "': D must be " + std::to_string(C.rows()) + "x" +
                             std::to_string(B.cols()));
    if (x.size() != A.rows()) throw DimensionError("block '" + name + "': state dimension mismatch");
    if (update_period == 0) throw std::invalid_argument("block '" + name + "': update period must be >= 1");
    A.require_finite("block A");
    B.require_finite("block B");
    C.require_finite("block C");
    D.require_finite("block D");
}

void LinearBlock::reset(Vec x0) {
    if (x0.size() != A.rows()) throw DimensionError("block '" + name + "': initial state dimension mismatch");
    x = std::move(x0);
    held_output.assign(C.rows(), 0.0);
}

Vec block_step(LinearBlock& block, const Vec& input, std::size_t k) {
    if (input.size() != block.input_dim())
        throw DimensionError("block '" + block.name + "': input dimension " +
                             std::to_string(input.size()) + ", expected " +
                             std::to_string(block.input_dim()));
    if (block.held_output.size() != block.output_dim())
        block.held_output.assign(block.output_dim(), 0.0);
    if (k % block.update_period == 0) {
        Vec out = vec_add(matvec(block.C, block.x), matvec(block.D, input));
        block.x = vec_add(matvec(block.A, block.x), matvec(block.B, input));
        block.held_output = out;
        return out;
    }
    return block.held_output;
}

LinearBlock realize_toy_controller(double alpha, double beta, double kappa, std::size_t period) {
    LinearBlock b;
    b.A = Matrix{{beta, -kappa * alpha}, {0.0, 0.0}};
    b.B = Matrix(2, 1, {kappa, 1.0});
    b.C = Matrix(1, 2, {beta, -kappa * alpha});
    b.D = Matrix::scalar(kappa);
    b.x = Vec(2, 0.0);
    b.held_output = Vec(1, 0.0);
    b.update_period = period;
    b.name = "toy_controller";
    return b;
}

LinearBlock build_pi(double kp, double ki) {
    LinearBlock b;
    b.A = Matrix::scalar(1.0);
    b.B = Matrix::scalar(1.0);
    b.C = Matrix::scalar(ki);
    b.D = Matrix::scalar(kp + ki);
    b.x = Vec(1, 0.0);
    b.held_output = Vec(1, 0.0);
    b.name = "pi_controller";
    return b;
}

LinearBlock build_lag(double kp, double ki, double rho) {
    if (std::abs(rho) >= 1.0)
        throw std::invalid_argument(
            "lag pole |rho| = " + std::to_string(std::abs(rho)) +
            " >= 1: the block would fail the Schur stability check certification requires; "
            "use build_pi if an integrating controller is intended");
    LinearBlock b;
    b.A = Matrix::scalar(rho);
    b.B = Matrix::scalar(1.0);
    b.C = Matrix::scalar(ki * rho);
    b.D = Matrix::scalar(kp + ki);
    b.x = Vec(1, 0.0);
    b.held_output = Vec(1, 0.0);
    b.name = "lag_controller";
    return b;
}

LinearBlock make_delay_filter() {
    LinearBlock b;
    b.A = Matrix::scalar(0.0);
    b.B = Matrix::scalar(1.0);
    b.C = Matrix::scalar(1.0);
    b.D = Matrix::scalar(0.0);
    b.x = Vec(1, 0.0);
    b.held_output = Vec(1, 0.0);
    b.name = "delay_filter";
    return b;
}

}  // namespace ergoloop
