#pragma once

namespace tailfit {

// Axis-aligned rectangle [x_lo, x_hi] x [y_lo, y_hi] in the positive quadrant.
struct Rectangle {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  double area() const noexcept { return (x_hi - x_lo) * (y_hi - y_lo); }
  bool degenerate() const noexcept { return !(x_hi > x_lo && y_hi > y_lo); }
  // Throws InvalidArgument unless 0 <= lo <= hi on both axes.
  void validate() const;

  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

}  // namespace tailfit
