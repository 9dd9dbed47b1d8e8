#pragma once

#include <array>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qtsim/state.hpp"

namespace qtsim {

// The four maximally entangled two-qubit states, labeled A..D:
//   A: (|01> - |10>)/sqrt(2)      B: (|01> + |10>)/sqrt(2)
//   C: (|00> - |11>)/sqrt(2)      D: (|00> + |11>)/sqrt(2)
// A is the singlet; the labels map to classical two-bit messages as
// A=00, B=01, C=10, D=11.
enum class BellOutcome { A, B, C, D };

constexpr std::array<BellOutcome, 4> kBellOutcomes = {
    BellOutcome::A, BellOutcome::B, BellOutcome::C, BellOutcome::D};

inline int bell_index(BellOutcome x) { return static_cast<int>(x); }

inline char bell_label(BellOutcome x) {
    return static_cast<char>('A' + bell_index(x));
}

inline BellOutcome bell_from_index(int k) {
    if (k < 0 || k > 3)
        throw std::out_of_range("bell_from_index: index out of range");
    return static_cast<BellOutcome>(k);
}

inline std::pair<int, int> to_bits(BellOutcome x) {
    const int k = bell_index(x);
    return {k >> 1, k & 1};
}

inline BellOutcome from_bits(int b0, int b1) {
    if ((b0 | b1) < 0 || b0 > 1 || b1 > 1)
        throw std::out_of_range("from_bits: bits must be 0 or 1");
    return bell_from_index(b0 * 2 + b1);
}

inline StateVector bell_state(BellOutcome x) {
    const double s = 0.70710678118654752440;  // 1/sqrt(2)
    const SubsystemLayout lay({2, 2});
    switch (x) {
        case BellOutcome::A:
            return StateVector(lay, {{0, 0}, {s, 0}, {-s, 0}, {0, 0}});
        case BellOutcome::B:
            return StateVector(lay, {{0, 0}, {s, 0}, {s, 0}, {0, 0}});
        case BellOutcome::C:
            return StateVector(lay, {{s, 0}, {0, 0}, {0, 0}, {-s, 0}});
        case BellOutcome::D:
            return StateVector(lay, {{s, 0}, {0, 0}, {0, 0}, {s, 0}});
    }
    throw std::out_of_range("bell_state: bad label");
}

inline std::vector<StateVector> bell_basis() {
    std::vector<StateVector> basis;
    basis.reserve(4);
    for (BellOutcome x : kBellOutcomes) basis.push_back(bell_state(x));
    return basis;
}

}  // namespace qtsim
