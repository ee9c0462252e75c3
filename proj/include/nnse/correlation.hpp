#pragma once

#include <span>
#include <vector>

namespace nnse {

// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> v);

// Both throw NumericalError for a constant input and DataError for unequal
// or too-short (< 2) sequences.
double pearson(std::span<const double> a, std::span<const double> b);
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace nnse
