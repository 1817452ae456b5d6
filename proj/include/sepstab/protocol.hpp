#pragma once

// Measurement cascade for one separable-projector test, implemented as a
// decision tree: every party before the last measures a complete orthonormal
// basis on its local space (which basis depends on the classical outcomes
// received so far), and the last party measures the binary effect
// accept_scale * |accept><accept|. Summed over all branches the accept
// probability is exactly tr(rho * projector).

#include <vector>

#include "sepstab/linalg.hpp"

namespace sepstab {

struct ProtocolTree {
    bool is_leaf = false;

    // intermediate party
    std::vector<Ket> basis;
    std::vector<ProtocolTree> next;

    // final party
    Ket accept;
    double accept_scale = 1.0;

    static ProtocolTree leaf(Ket v, double scale = 1.0) {
        ProtocolTree t;
        t.is_leaf = true;
        t.accept = std::move(v);
        t.accept_scale = scale;
        return t;
    }

    static ProtocolTree node(std::vector<Ket> outcome_basis, std::vector<ProtocolTree> children) {
        if (outcome_basis.size() != children.size())
            throw DimensionMismatch("ProtocolTree: one subtree per outcome required");
        ProtocolTree t;
        t.basis = std::move(outcome_basis);
        t.next = std::move(children);
        return t;
    }
};

} // namespace sepstab
