#pragma once

#include <vector>

#include "geometry.hpp"

namespace arw {

/// Dense per-site storage over a centered box.
template <int D, class T>
class Grid {
  public:
    Grid() = default;
    explicit Grid(const Box<D>& box, const T& fill = T{})
        : box_(box), data_(static_cast<std::size_t>(box.volume()), fill) {}

    const Box<D>& box() const { return box_; }

    T& at(const Site<D>& x) { return data_[static_cast<std::size_t>(box_.index_of(x))]; }
    const T& at(const Site<D>& x) const {
        return data_[static_cast<std::size_t>(box_.index_of(x))];
    }

    const std::vector<T>& data() const { return data_; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.box_ == b.box_ && a.data_ == b.data_;
    }

  private:
    Box<D> box_;
    std::vector<T> data_;
};

} // namespace arw
