#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtsim/state.hpp"

namespace qtsim {

// Single optical mode truncated to photon numbers 0..dim-1, normalized on
// construction like StateVector.
class FockVector {
public:
    FockVector(int dim, std::vector<cplx> c) : state_(make(dim, std::move(c))) {}

    static FockVector vacuum(int dim) {
        std::vector<cplx> c(check_dim(dim), cplx(0, 0));
        c[0] = cplx(1, 0);
        return FockVector(dim, std::move(c));
    }

    static FockVector single_photon(int dim) {
        std::vector<cplx> c(check_dim(dim), cplx(0, 0));
        c[1] = cplx(1, 0);
        return FockVector(dim, std::move(c));
    }

    int dim() const { return state_.dim(); }
    const std::vector<cplx>& amps() const { return state_.amps(); }
    cplx operator[](int n) const { return state_[n]; }

    // Largest photon number with nonzero amplitude.
    int highest_occupied() const {
        for (int n = dim() - 1; n >= 0; --n)
            if (std::abs(state_[n]) > 0.0) return n;
        return 0;
    }

    // Same state in a larger truncation. Refuses to drop populated
    // amplitudes.
    FockVector embedded(int new_dim) const {
        if (new_dim < dim()) {
            for (int n = new_dim; n < dim(); ++n)
                if (std::abs(state_[n]) > 0.0)
                    throw std::invalid_argument(
                        "FockVector: embedding would truncate photon number " +
                        std::to_string(n));
        }
        std::vector<cplx> c(new_dim, cplx(0, 0));
        for (int n = 0; n < std::min(new_dim, dim()); ++n) c[n] = state_[n];
        return FockVector(new_dim, std::move(c));
    }

    const StateVector& as_state() const { return state_; }

private:
    static int check_dim(int dim) {
        if (dim < 2)
            throw std::invalid_argument("FockVector: dim must be >= 2");
        return dim;
    }

    static StateVector make(int dim, std::vector<cplx> c) {
        check_dim(dim);
        return StateVector(SubsystemLayout({dim}), std::move(c));
    }

    StateVector state_;
};

}  // namespace qtsim
