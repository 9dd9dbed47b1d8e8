#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "qtsim/layout.hpp"

namespace qtsim::detail {

// Index bookkeeping for operations that act on a subset of subsystems.
//
// For a chosen target list, every basis index of the full space splits as
// base + offset: `offsets` enumerates the target digits (packed row-major in
// target-list order), `bases` enumerates the remaining digits with all target
// digits zeroed. Gather/scatter over a target block is then
// amps[bases[b] + offsets[m]].
struct TargetIndexer {
    std::vector<int> targets;
    std::vector<int> target_dims;
    int block_dim = 1;           // product of target dims
    std::vector<int> offsets;    // block_dim entries
    std::vector<int> bases;      // total_dim / block_dim entries
};

inline TargetIndexer make_indexer(const SubsystemLayout& layout,
                                  const std::vector<int>& targets) {
    if (targets.empty())
        throw std::invalid_argument("make_indexer: no target subsystems");
    std::vector<bool> seen(layout.size(), false);
    for (int t : targets) {
        if (t < 0 || t >= layout.size())
            throw std::out_of_range("make_indexer: target out of range");
        if (seen[t])
            throw std::invalid_argument("make_indexer: repeated target");
        seen[t] = true;
    }

    TargetIndexer ix;
    ix.targets = targets;
    long long block = 1;
    for (int t : targets) {
        ix.target_dims.push_back(layout.dim(t));
        block *= layout.dim(t);
    }
    ix.block_dim = static_cast<int>(block);

    // offsets[m]: digits of m (row-major over target_dims, first target most
    // significant) placed at the targets' strides.
    ix.offsets.resize(ix.block_dim);
    for (int m = 0; m < ix.block_dim; ++m) {
        int rem = m;
        int off = 0;
        for (int k = static_cast<int>(targets.size()) - 1; k >= 0; --k) {
            const int d = ix.target_dims[k];
            off += (rem % d) * layout.stride(targets[k]);
            rem /= d;
        }
        ix.offsets[m] = off;
    }

    // bases: all indices whose target digits are zero, ascending.
    ix.bases.reserve(layout.total_dim() / ix.block_dim);
    for (int i = 0; i < layout.total_dim(); ++i) {
        bool zero = true;
        for (size_t k = 0; k < targets.size(); ++k) {
            if ((i / layout.stride(targets[k])) % layout.dim(targets[k]) != 0) {
                zero = false;
                break;
            }
        }
        if (zero) ix.bases.push_back(i);
    }
    return ix;
}

// Dims of the subsystems not in `targets`, in their original order.
inline std::vector<int> complement_dims(const SubsystemLayout& layout,
                                        const std::vector<int>& targets) {
    std::vector<bool> is_target(layout.size(), false);
    for (int t : targets) is_target[t] = true;
    std::vector<int> dims;
    for (int k = 0; k < layout.size(); ++k)
        if (!is_target[k]) dims.push_back(layout.dim(k));
    return dims;
}

}  // namespace qtsim::detail
