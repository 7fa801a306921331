#include "aigiqa/metrics.hpp"

#include "aigiqa/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace aigiqa {

namespace {

void check_pairs(std::span<const double> p, std::span<const double> y) {
    if (p.size() != y.size()) {
        throw Error(ErrorCode::ShapeMismatch, "paired series differ in length: " + std::to_string(p.size()) + " vs " +
                                                  std::to_string(y.size()));
    }
    if (p.size() < 2) {
        throw Error(ErrorCode::DegenerateSeries, "correlation needs at least two pairs");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || !std::isfinite(y[i])) {
            throw Error(ErrorCode::NonFiniteScore, "non-finite value at pair " + std::to_string(i));
        }
    }
}

double pearson(std::span<const double> a, std::span<const double> b, const char * what) {
    const double n = double(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw Error(ErrorCode::DegenerateSeries, std::string(what) + ": a series has zero variance");
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Counts inversions of `v` while merge-sorting it.
std::int64_t merge_count(std::vector<double> & v, std::vector<double> & buf, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) {
        return 0;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
    std::size_t i = lo;
    std::size_t j = mid;
    std::size_t k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += static_cast<std::int64_t>(mid - i);
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    return swaps;
}

// Sum of t(t-1)/2 over runs of equal values in an already sorted sequence.
std::int64_t tied_pairs(const std::vector<double> & sorted) {
    std::int64_t total = 0;
    std::int64_t run = 1;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total;
}

} // namespace

void PairedScores::validate() const { check_pairs(predicted, subjective); }

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) {
            ++j;
        }
        const double mean_rank = 0.5 * double(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t t = i; t < j; ++t) {
            ranks[order[t]] = mean_rank;
        }
        i = j;
    }
    return ranks;
}

double plcc(std::span<const double> predicted, std::span<const double> subjective) {
    check_pairs(predicted, subjective);
    return pearson(predicted, subjective, "plcc");
}

double srcc(std::span<const double> predicted, std::span<const double> subjective) {
    check_pairs(predicted, subjective);
    const auto rp = average_ranks(predicted);
    const auto ry = average_ranks(subjective);
    return pearson(rp, ry, "srcc");
}

double krcc(std::span<const double> predicted, std::span<const double> subjective) {
    check_pairs(predicted, subjective);
    const std::size_t n = predicted.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (predicted[a] != predicted[b]) return predicted[a] < predicted[b];
        return subjective[a] < subjective[b];
    });

    std::vector<double> xs(n);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = predicted[order[i]];
        ys[i] = subjective[order[i]];
    }

    const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const std::int64_t x_ties = tied_pairs(xs);
    std::int64_t joint_ties = 0;
    std::int64_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
            ++run;
        } else {
            joint_ties += run * (run - 1) / 2;
            run = 1;
        }
    }

    std::vector<double> buf(n);
    const std::int64_t swaps = merge_count(ys, buf, 0, n);  // ys is sorted afterwards
    const std::int64_t y_ties = tied_pairs(ys);

    const double denom = std::sqrt(double(n0 - x_ties) * double(n0 - y_ties));
    if (denom == 0.0) {
        throw Error(ErrorCode::DegenerateSeries, "krcc: every pair is tied in one series");
    }
    const double concordant_minus_discordant = double(n0 - x_ties - y_ties + joint_ties - 2 * swaps);
    return std::clamp(concordant_minus_discordant / denom, -1.0, 1.0);
}

double plcc(const PairedScores & p) { return plcc(p.predicted, p.subjective); }
double srcc(const PairedScores & p) { return srcc(p.predicted, p.subjective); }
double krcc(const PairedScores & p) { return krcc(p.predicted, p.subjective); }

double Logistic4::operator()(double x) const {
    return b2 + (b1 - b2) / (1.0 + std::exp(-(x - b3) / std::abs(b4)));
}

Logistic4 fit_logistic4(std::span<const double> predicted, std::span<const double> subjective) {
    check_pairs(predicted, subjective);
    const auto n = static_cast<Eigen::Index>(predicted.size());
    const double mean_x = std::accumulate(predicted.begin(), predicted.end(), 0.0) / double(n);
    double var_x = 0.0;
    for (double v : predicted) var_x += (v - mean_x) * (v - mean_x);
    const double std_x = std::sqrt(var_x / double(n));

    // theta = (b1, b2, b3, log b4)
    Eigen::Vector4d theta(*std::max_element(subjective.begin(), subjective.end()),
                          *std::min_element(subjective.begin(), subjective.end()), mean_x,
                          std::log(std_x > 0.0 ? std_x : 1.0));
    auto residuals = [&](const Eigen::Vector4d & t, Eigen::VectorXd & r, Eigen::MatrixXd * jac) {
        const double scale = std::exp(t(3));
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = (predicted[i] - t(2)) / scale;
            const double s = 1.0 / (1.0 + std::exp(-u));
            r(i) = t(1) + (t(0) - t(1)) * s - subjective[i];
            if (jac != nullptr) {
                const double ds = (t(0) - t(1)) * s * (1.0 - s);
                (*jac)(i, 0) = s;
                (*jac)(i, 1) = 1.0 - s;
                (*jac)(i, 2) = -ds / scale;
                (*jac)(i, 3) = -ds * u;
            }
        }
        return r.squaredNorm();
    };

    Eigen::VectorXd r(n);
    Eigen::MatrixXd jac(n, 4);
    double cost = residuals(theta, r, &jac);
    double lambda = 1e-3;
    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::Matrix4d jtj = jac.transpose() * jac;
        const Eigen::Vector4d jtr = jac.transpose() * r;
        Eigen::Matrix4d a = jtj;
        a.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
        const Eigen::Vector4d step = a.ldlt().solve(-jtr);
        const Eigen::Vector4d candidate = theta + step;
        Eigen::VectorXd rc(n);
        const double c = residuals(candidate, rc, nullptr);
        if (std::isfinite(c) && c < cost) {
            const double improvement = cost - c;
            theta = candidate;
            cost = residuals(theta, r, &jac);
            lambda = std::max(lambda / 10.0, 1e-12);
            if (improvement < 1e-14 * (1.0 + cost)) {
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                break;
            }
        }
    }
    return Logistic4{theta(0), theta(1), theta(2), std::exp(theta(3))};
}

double plcc_logistic(std::span<const double> predicted, std::span<const double> subjective) {
    const Logistic4 f = fit_logistic4(predicted, subjective);
    std::vector<double> mapped(predicted.size());
    std::transform(predicted.begin(), predicted.end(), mapped.begin(), f);
    return plcc(mapped, subjective);
}

Correlations correlations(std::span<const double> predicted, std::span<const double> subjective, bool logistic_plcc) {
    Correlations c;
    c.plcc = logistic_plcc ? plcc_logistic(predicted, subjective) : plcc(predicted, subjective);
    c.srcc = srcc(predicted, subjective);
    c.krcc = krcc(predicted, subjective);
    return c;
}

} // namespace aigiqa
