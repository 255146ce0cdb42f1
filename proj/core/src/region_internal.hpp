#pragma once

#include <vector>

namespace tslab::detail {

// Smallest t with p + t (1, ..., 1) in conv(pts) + nonnegative orthant.
double shift_to_closure(const std::vector<std::vector<double>>& pts, const std::vector<double>& p);

// Drops duplicates and points dominated by another point.
std::vector<std::vector<double>> minimal_points(std::vector<std::vector<double>> pts);

}  // namespace tslab::detail
