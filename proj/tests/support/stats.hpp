#pragma once

// Test-only statistics helpers: Kolmogorov-Smirnov and chi-square tests.
// Independent of the simulation code they are used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace teststats {

// Kolmogorov asymptotic tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
inline double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double ks_p_from_stat(double d, double n_eff) {
    const double sq = std::sqrt(n_eff);
    return kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
}

// One-sample KS against an analytic CDF.
inline double ks_test_cdf(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return ks_p_from_stat(d, n);
}

// Two-sample KS.
inline double ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    return ks_p_from_stat(d, na * nb / (na + nb));
}

// Chi-square homogeneity test on two count vectors over the same categories.
// Categories with too few pooled counts are merged into the tail.
inline double chi_square_homogeneity(const std::vector<std::uint64_t>& a,
                                     const std::vector<std::uint64_t>& b,
                                     double min_expected = 5.0) {
    if (a.size() != b.size()) throw std::invalid_argument("category count mismatch");
    double na = 0.0, nb = 0.0;
    for (auto c : a) na += static_cast<double>(c);
    for (auto c : b) nb += static_cast<double>(c);
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("empty sample");
    const double total = na + nb;

    // pool sparse categories so expected counts stay reasonable
    std::vector<std::pair<double, double>> cells;
    double acc_a = 0.0, acc_b = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        acc_a += static_cast<double>(a[k]);
        acc_b += static_cast<double>(b[k]);
        const double pooled = acc_a + acc_b;
        if (pooled / total * std::min(na, nb) >= min_expected) {
            cells.emplace_back(acc_a, acc_b);
            acc_a = acc_b = 0.0;
        }
    }
    if (acc_a + acc_b > 0.0) {
        if (cells.empty())
            cells.emplace_back(acc_a, acc_b);
        else {
            cells.back().first += acc_a;
            cells.back().second += acc_b;
        }
    }
    if (cells.size() < 2) return 1.0;  // everything in one cell, nothing to test

    double stat = 0.0;
    for (const auto& [ca, cb] : cells) {
        const double p = (ca + cb) / total;
        const double ea = p * na, eb = p * nb;
        stat += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
    }
    const boost::math::chi_squared dist(static_cast<double>(cells.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

// Chi-square goodness-of-fit of observed counts against given probabilities.
inline double chi_square_gof(const std::vector<std::uint64_t>& observed,
                             const std::vector<double>& probs) {
    if (observed.size() != probs.size()) throw std::invalid_argument("category count mismatch");
    double n = 0.0;
    for (auto c : observed) n += static_cast<double>(c);
    double stat = 0.0;
    std::size_t dof = 0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        const double e = probs[k] * n;
        if (e <= 0.0) continue;
        const double o = static_cast<double>(observed[k]);
        stat += (o - e) * (o - e) / e;
        ++dof;
    }
    if (dof < 2) return 1.0;
    const boost::math::chi_squared dist(static_cast<double>(dof - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double stddev(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace teststats
