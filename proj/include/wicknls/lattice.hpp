#pragma once

#include <cstdint>
#include <vector>

namespace wicknls {

// A frequency on the integer lattice Z^2.
struct Mode {
    int32_t n1 = 0;
    int32_t n2 = 0;

    friend bool operator==(const Mode&, const Mode&) = default;
    friend auto operator<=>(const Mode&, const Mode&) = default; // lexicographic
};

inline int64_t norm_sq(Mode n) {
    return int64_t(n.n1) * n.n1 + int64_t(n.n2) * n.n2;
}

// The modes { n in Z^2 : |n| <= N }, sorted lexicographically, with O(1)
// index lookup by row. Layouts are cached per cutoff and shared.
class ModeSet {
public:
    explicit ModeSet(int cutoff);

    int cutoff() const { return cutoff_; }
    const std::vector<Mode>& modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }
    Mode operator[](std::size_t i) const { return modes_[i]; }

    bool contains(Mode n) const;
    // Index of n in modes(); -1 if |n| > cutoff.
    std::ptrdiff_t index_of(Mode n) const;

    // Shared immutable instance for a given cutoff.
    static const ModeSet& get(int cutoff);

private:
    int cutoff_ = 0;
    std::vector<Mode> modes_;
    std::vector<std::size_t> row_start_; // per n1 in [-N, N]
};

} // namespace wicknls
