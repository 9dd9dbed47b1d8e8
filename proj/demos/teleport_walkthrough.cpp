// Walks one qubit through the teleportation pipeline, printing each stage:
// resource preparation, the joint measurement, the classical bits, and the
// exact recovery on the receiving side.

#include <cstdio>
#include <iostream>

#include "qtsim/rng.hpp"
#include "qtsim/teleport.hpp"

namespace {

void print_qubit(const char* label, const qtsim::StateVector& q) {
    std::printf("%-22s (%+.6f%+.6fi)|0> + (%+.6f%+.6fi)|1>\n", label,
                q[0].real(), q[0].imag(), q[1].real(), q[1].imag());
}

}  // namespace

int main() {
    const qtsim::StateVector input =
        qtsim::StateVector::single_qubit({0.6, 0.2}, {-0.4, 0.66332495807});
    print_qubit("input", input);

    qtsim::RngStream rng(2024, 1);
    for (int round = 0; round < 4; ++round) {
        const qtsim::TeleportResult r = qtsim::teleport(input, rng);
        std::printf("\nround %d: outcome %c, classical bits %d%d, p=%.3f\n",
                    round, qtsim::bell_label(r.outcome), r.message.first,
                    r.message.second, r.probability);
        print_qubit("  before correction", r.bob_conditional);
        print_qubit("  after correction", r.bob_state);
        std::printf("  fidelity to input: %.15f\n", r.fidelity_to_input);
    }
    return 0;
}
