#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace pathrev {

struct SampleSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0; // unbiased
    double std_error = 0.0;
};

inline SampleSummary summarize(std::span<const double> xs)
{
    SampleSummary s;
    s.count = xs.size();
    if (xs.empty()) {
        return s;
    }
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - s.mean) * (x - s.mean);
        }
        s.variance = ss / static_cast<double>(xs.size() - 1);
        s.std_error = std::sqrt(s.variance / static_cast<double>(xs.size()));
    }
    return s;
}

/// Standard error of the mean by non-overlapping batch means; for correlated
/// output such as successive waiting times.
inline double batch_means_std_error(std::span<const double> xs, std::size_t batches = 30)
{
    if (batches < 2 || xs.size() < 2 * batches) {
        throw std::invalid_argument("batch_means_std_error: too few samples for the batch count");
    }
    const std::size_t per = xs.size() / batches;
    double grand = 0.0;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        const auto first = xs.begin() + static_cast<std::ptrdiff_t>(b * per);
        means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(per), 0.0) / static_cast<double>(per);
        grand += means[b];
    }
    grand /= static_cast<double>(batches);
    double ss = 0.0;
    for (double m : means) {
        ss += (m - grand) * (m - grand);
    }
    return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

} // namespace pathrev
