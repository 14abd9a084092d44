#pragma once

#include <string>
#include <vector>

#include "ergoloop/topology.hpp"

namespace ergoloop {

enum class CertVerdict { certified_unique, certified_existence, not_certified };

std::string to_string(CertVerdict v);

struct CertCheck {
    std::string name;        // e.g. "schur.controller", "probability_floor", "graph.primitive"
    std::string component;   // offending / examined component
    bool passed = false;
    std::string hypothesis;  // the formal condition this check instantiates
    std::string detail;      // measured quantities
    bool informational = false;  // recorded values that are not hypotheses
};

struct CertifyOptions {
    double schur_tol = 1e-9;
    std::size_t probability_grid_points = 1001;
    std::size_t contraction_m_max = 10000;
    std::size_t exact_contraction_dim_cap = 64;  // larger systems use repeated squaring
    std::size_t product_graph_cap = 4096;
};

struct CertificationReport {
    CertVerdict verdict = CertVerdict::not_certified;
    std::string applicable_theorem;  // Thm1 | Thm2 | Thm3 | Thm4 | Prop1 | Prop2 | none
    std::vector<CertCheck> checks;
    std::string note;
};

/// Mechanically verifies the sufficient conditions for unique ergodicity that
/// apply to the topology's wiring and agent kind: Schur stability of every
/// state matrix, positive probability floors over the signal range, strict
/// map contractivity (nonlinear agents), strong connectivity plus primitivity
/// (finite-state agents), and contractivity of the assembled augmented matrix.
CertificationReport certify(const Topology& t, const CertifyOptions& options = {});

/// Human-readable rendering: one line per check with its hypothesis and the
/// measured detail.
std::string explain(const CertificationReport& report);

}  // namespace ergoloop
