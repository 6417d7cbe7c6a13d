#pragma once

#include <cstdint>
#include <vector>

namespace ppm {

/// Allowed source/target vertex pairs at the current resolution, derived
/// from a coarser matching. Membership is evaluated through two per-vertex
/// reach sets over the low-resolution target vertices: (x, y) is allowed
/// iff the reach sets intersect.
class AllowedSet {
public:
    AllowedSet(int num_x, int num_y, int num_low_y)
        : num_x_(num_x),
          num_y_(num_y),
          words_(static_cast<int>((num_low_y + 63) / 64)),
          x_reach_(static_cast<std::size_t>(num_x) * words_, 0),
          y_reach_(static_cast<std::size_t>(num_y) * words_, 0) {}

    void add_x_reach(int x, int low_y) { set_bit(x_reach_, x, low_y); }
    void add_y_reach(int y, int low_y) { set_bit(y_reach_, y, low_y); }

    bool contains(int x, int y) const {
        const std::uint64_t* a = x_reach_.data() + static_cast<std::size_t>(x) * words_;
        const std::uint64_t* b = y_reach_.data() + static_cast<std::size_t>(y) * words_;
        for (int w = 0; w < words_; ++w)
            if (a[w] & b[w]) return true;
        return false;
    }

    bool empty() const {
        for (int x = 0; x < num_x_; ++x)
            for (int y = 0; y < num_y_; ++y)
                if (contains(x, y)) return false;
        return true;
    }

    int num_x() const { return num_x_; }
    int num_y() const { return num_y_; }

private:
    void set_bit(std::vector<std::uint64_t>& bits, int row, int col) {
        bits[static_cast<std::size_t>(row) * words_ + col / 64] |= std::uint64_t(1) << (col % 64);
    }

    int num_x_, num_y_, words_;
    std::vector<std::uint64_t> x_reach_;
    std::vector<std::uint64_t> y_reach_;
};

}  // namespace ppm
