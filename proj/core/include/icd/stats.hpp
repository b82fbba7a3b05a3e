// Small statistics helpers for the benchmark reports.
#pragma once

#include <vector>

namespace icd {

// 1-based ranks; ties share their mean rank.
std::vector<double> average_ranks(const std::vector<double>& v);

// Spearman rank correlation. NaN on mismatched/empty input or when
// either side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Linear-interpolation quantile of an ascending sample, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace icd
