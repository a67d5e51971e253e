#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfopt {

// A turbine position in meters.
struct Turbine {
    double x = 0.0;
    double y = 0.0;
};

inline double squared_distance(const Turbine& a, const Turbine& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double distance(const Turbine& a, const Turbine& b) {
    return std::sqrt(squared_distance(a, b));
}

// A wind farm layout: an unordered collection of turbine coordinates.
// Equality is order-insensitive; iteration order is the insertion order.
class Layout {
public:
    Layout() = default;
    explicit Layout(std::vector<Turbine> turbines) : turbines_(std::move(turbines)) {
        for (const auto& t : turbines_) {
            if (!std::isfinite(t.x) || !std::isfinite(t.y))
                throw std::invalid_argument("layout: turbine coordinates must be finite");
        }
    }

    void add(Turbine t) {
        if (!std::isfinite(t.x) || !std::isfinite(t.y))
            throw std::invalid_argument("layout: turbine coordinates must be finite");
        turbines_.push_back(t);
    }

    std::size_t size() const { return turbines_.size(); }
    bool empty() const { return turbines_.empty(); }

    const Turbine& operator[](std::size_t i) const { return turbines_[i]; }
    auto begin() const { return turbines_.begin(); }
    auto end() const { return turbines_.end(); }
    const std::vector<Turbine>& turbines() const { return turbines_; }

    // Copy with members sorted by (x, y); canonical form for equality and keys.
    Layout canonical() const {
        Layout out = *this;
        std::sort(out.turbines_.begin(), out.turbines_.end(),
                  [](const Turbine& a, const Turbine& b) {
                      return a.x != b.x ? a.x < b.x : a.y < b.y;
                  });
        return out;
    }

    friend bool operator==(const Layout& a, const Layout& b) {
        if (a.size() != b.size()) return false;
        const Layout ca = a.canonical();
        const Layout cb = b.canonical();
        for (std::size_t i = 0; i < ca.size(); ++i)
            if (ca[i].x != cb[i].x || ca[i].y != cb[i].y) return false;
        return true;
    }

private:
    std::vector<Turbine> turbines_;
};

// Order-insensitive key for dedup and caching.
inline std::uint64_t layout_key(const Layout& layout) {
    const Layout c = layout.canonical();
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](double v) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h ^= bits;
        h *= 1099511628211ull;
    };
    for (const auto& t : c) {
        mix(t.x);
        mix(t.y);
    }
    return h;
}

}  // namespace wfopt
