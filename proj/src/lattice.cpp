#include "wicknls/lattice.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace wicknls {

ModeSet::ModeSet(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 0) throw std::invalid_argument("ModeSet: cutoff must be >= 0");
    const int64_t r2 = int64_t(cutoff) * cutoff;
    row_start_.assign(2 * std::size_t(cutoff) + 2, 0);
    for (int32_t n1 = -cutoff; n1 <= cutoff; ++n1) {
        row_start_[std::size_t(n1 + cutoff)] = modes_.size();
        const int64_t rem = r2 - int64_t(n1) * n1;
        const int32_t h = int32_t(std::sqrt(double(rem)) + 1.5);
        for (int32_t n2 = -h; n2 <= h; ++n2)
            if (int64_t(n1) * n1 + int64_t(n2) * n2 <= r2) modes_.push_back({n1, n2});
    }
    row_start_[2 * std::size_t(cutoff) + 1] = modes_.size();
}

bool ModeSet::contains(Mode n) const {
    return norm_sq(n) <= int64_t(cutoff_) * cutoff_;
}

std::ptrdiff_t ModeSet::index_of(Mode n) const {
    if (!contains(n)) return -1;
    const std::size_t row = std::size_t(n.n1 + cutoff_);
    // rows are contiguous in n2
    const Mode first = modes_[row_start_[row]];
    return std::ptrdiff_t(row_start_[row]) + (n.n2 - first.n2);
}

const ModeSet& ModeSet::get(int cutoff) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<ModeSet>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[cutoff];
    if (!slot) slot = std::make_unique<ModeSet>(cutoff);
    return *slot;
}

} // namespace wicknls
