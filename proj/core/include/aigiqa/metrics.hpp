#pragma once

#include <span>
#include <vector>

namespace aigiqa {

/// Predicted scores paired with subjective scores (MOS). Equal length,
/// n >= 2, all finite.
struct PairedScores {
    std::vector<double> predicted;
    std::vector<double> subjective;

    void validate() const;
};

/// Pearson correlation of the raw pairs.
double plcc(std::span<const double> predicted, std::span<const double> subjective);

/// Spearman correlation: Pearson correlation of average (fractional) ranks.
double srcc(std::span<const double> predicted, std::span<const double> subjective);

/// Kendall tau-b, O(n log n).
double krcc(std::span<const double> predicted, std::span<const double> subjective);

double plcc(const PairedScores & p);
double srcc(const PairedScores & p);
double krcc(const PairedScores & p);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Monotone four-parameter logistic y = b2 + (b1 - b2) / (1 + exp(-(x - b3) / |b4|)).
struct Logistic4 {
    double b1 = 1.0;
    double b2 = 0.0;
    double b3 = 0.0;
    double b4 = 1.0;

    double operator()(double x) const;
};

/// Least-squares fit of `subjective ~ Logistic4(predicted)` (Levenberg-Marquardt).
Logistic4 fit_logistic4(std::span<const double> predicted, std::span<const double> subjective);

/// PLCC after mapping predictions through the fitted logistic.
double plcc_logistic(std::span<const double> predicted, std::span<const double> subjective);

struct Correlations {
    double plcc = 0.0;
    double srcc = 0.0;
    double krcc = 0.0;
};

Correlations correlations(std::span<const double> predicted, std::span<const double> subjective,
                          bool logistic_plcc = false);

} // namespace aigiqa
