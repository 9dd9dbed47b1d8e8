// Feeds a family of three-photon states through the scissors device and
// tabulates the herald probabilities against the closed-form quarter law,
// plus the truncated output the successful heralds deliver.

#include <cmath>
#include <cstdio>

#include "qtsim/scissors.hpp"

int main() {
    qtsim::ScissorsParams params;
    params.dim = 6;

    std::printf("%6s  %10s  %10s  %10s  %22s\n", "mix", "P(1,0)", "P(0,1)",
                "(law)", "heralded |0>,|1> amps");
    for (int step = 0; step <= 8; ++step) {
        // Interpolate between a mostly-classical low state and one weighted
        // toward two and three photons.
        const double w = step / 8.0;
        const qtsim::FockVector input(
            4, {qtsim::cplx(1.0 - w, 0), qtsim::cplx(0.7, 0.2 * w),
                qtsim::cplx(0.5 * w, -0.3), qtsim::cplx(w, 0.4)});

        const qtsim::ScissorsSession session(input, params);
        const double law =
            (std::norm(input[0]) + std::norm(input[1])) / 4.0;
        const qtsim::ScissorsResult out = session.forced({1, 0});
        std::printf("%6.3f  %10.6f  %10.6f  %10.6f  (%+.3f%+.3fi, %+.3f%+.3fi)\n",
                    w, session.pattern_prob({1, 0}),
                    session.pattern_prob({0, 1}), law, out.output[0].real(),
                    out.output[0].imag(), out.output[1].real(),
                    out.output[1].imag());
    }
    return 0;
}
