#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtsim {

// Describes how a composite Hilbert space is split into subsystems.
//
// Indexing convention (used everywhere in this library): subsystem 0 is the
// most significant digit of a basis index. For dims {d0, d1, d2} the basis
// index of digits (i0, i1, i2) is (i0 * d1 + i1) * d2 + i2, so |i0 i1 i2>
// reads left to right exactly like the ket label.
class SubsystemLayout {
public:
    explicit SubsystemLayout(std::vector<int> dims) : dims_(std::move(dims)) {
        if (dims_.empty())
            throw std::invalid_argument("SubsystemLayout: no subsystems");
        long long total = 1;
        for (int d : dims_) {
            if (d < 2)
                throw std::invalid_argument(
                    "SubsystemLayout: subsystem dimension must be >= 2, got " +
                    std::to_string(d));
            total *= d;
            if (total > (1LL << 26))
                throw std::invalid_argument(
                    "SubsystemLayout: total dimension too large");
        }
        total_ = static_cast<int>(total);
        strides_.resize(dims_.size());
        int s = 1;
        for (int k = static_cast<int>(dims_.size()) - 1; k >= 0; --k) {
            strides_[k] = s;
            s *= dims_[k];
        }
    }

    int size() const { return static_cast<int>(dims_.size()); }
    int total_dim() const { return total_; }
    const std::vector<int>& dims() const { return dims_; }

    int dim(int k) const {
        check_subsystem(k);
        return dims_[k];
    }

    // Place value of subsystem k in a packed basis index.
    int stride(int k) const {
        check_subsystem(k);
        return strides_[k];
    }

    int index_of(const std::vector<int>& digits) const {
        if (static_cast<int>(digits.size()) != size())
            throw std::invalid_argument("index_of: digit count mismatch");
        int idx = 0;
        for (int k = 0; k < size(); ++k) {
            if (digits[k] < 0 || digits[k] >= dims_[k])
                throw std::out_of_range("index_of: digit out of range");
            idx += digits[k] * strides_[k];
        }
        return idx;
    }

    std::vector<int> digits_of(int index) const {
        if (index < 0 || index >= total_)
            throw std::out_of_range("digits_of: index out of range");
        std::vector<int> digits(dims_.size());
        for (int k = 0; k < size(); ++k) {
            digits[k] = (index / strides_[k]) % dims_[k];
        }
        return digits;
    }

    bool operator==(const SubsystemLayout& other) const {
        return dims_ == other.dims_;
    }
    bool operator!=(const SubsystemLayout& other) const {
        return !(*this == other);
    }

private:
    void check_subsystem(int k) const {
        if (k < 0 || k >= size())
            throw std::out_of_range("SubsystemLayout: no subsystem " +
                                    std::to_string(k));
    }

    std::vector<int> dims_;
    std::vector<int> strides_;
    int total_ = 0;
};

}  // namespace qtsim
