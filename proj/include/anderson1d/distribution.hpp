#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "anderson1d/rng.hpp"

namespace anderson {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

// Merge a list of closed intervals into a minimal disjoint union.
inline std::vector<Interval> merge_intervals(std::vector<Interval> in, double tol = 1e-12) {
    if (in.empty()) return in;
    std::sort(in.begin(), in.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    out.push_back(in.front());
    for (std::size_t i = 1; i < in.size(); ++i) {
        if (in[i].lo <= out.back().hi + tol) {
            out.back().hi = std::max(out.back().hi, in[i].hi);
        } else {
            out.push_back(in[i]);
        }
    }
    return out;
}

// The single-site measure: either a finite list of weighted atoms or a
// piecewise-constant density on a compact partition. Both admit exact CDF
// inversion, and the density case admits exact cell integrals, which the
// integral-operator discretization relies on.
class SiteDistribution {
  public:
    enum class Kind { atomic, density };

    static SiteDistribution atoms(std::vector<std::pair<double, double>> atom_list) {
        SiteDistribution d;
        d.kind_ = Kind::atomic;
        if (atom_list.empty()) throw std::invalid_argument("SiteDistribution: no atoms");
        std::sort(atom_list.begin(), atom_list.end());
        double total = 0.0;
        for (auto& [v, w] : atom_list) {
            if (w < 0) throw std::invalid_argument("SiteDistribution: negative atom weight");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("SiteDistribution: atom weights must sum to 1");
        d.atoms_ = std::move(atom_list);
        d.cum_.resize(d.atoms_.size());
        double c = 0.0;
        for (std::size_t i = 0; i < d.atoms_.size(); ++i) {
            c += d.atoms_[i].second;
            d.cum_[i] = c;
        }
        d.cum_.back() = 1.0;
        return d;
    }

    static SiteDistribution point_mass(double v) { return atoms({{v, 1.0}}); }

    static SiteDistribution bernoulli(double a, double b, double p_b = 0.5) {
        return atoms({{a, 1.0 - p_b}, {b, p_b}});
    }

    // Density r(x) = values[i] on [breaks[i], breaks[i+1]).
    static SiteDistribution piecewise(std::vector<double> breaks, std::vector<double> values) {
        SiteDistribution d;
        d.kind_ = Kind::density;
        if (breaks.size() < 2 || values.size() + 1 != breaks.size())
            throw std::invalid_argument("SiteDistribution: breaks/values shape");
        for (std::size_t i = 1; i < breaks.size(); ++i)
            if (!(breaks[i] > breaks[i - 1]))
                throw std::invalid_argument("SiteDistribution: breaks must increase");
        double total = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] < 0) throw std::invalid_argument("SiteDistribution: negative density");
            total += values[i] * (breaks[i + 1] - breaks[i]);
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("SiteDistribution: density must integrate to 1");
        d.breaks_ = std::move(breaks);
        d.values_ = std::move(values);
        d.cum_.assign(d.breaks_.size(), 0.0);
        for (std::size_t i = 0; i < d.values_.size(); ++i)
            d.cum_[i + 1] = d.cum_[i] + d.values_[i] * (d.breaks_[i + 1] - d.breaks_[i]);
        d.cum_.back() = 1.0;
        return d;
    }

    static SiteDistribution uniform(double a, double b) {
        return piecewise({a, b}, {1.0 / (b - a)});
    }

    Kind kind() const { return kind_; }
    bool is_atomic() const { return kind_ == Kind::atomic; }

    const std::vector<std::pair<double, double>>& atom_list() const { return atoms_; }
    const std::vector<double>& breaks() const { return breaks_; }
    const std::vector<double>& piece_values() const { return values_; }

    // supp nu as a minimal union of closed intervals (atoms are degenerate).
    std::vector<Interval> support() const {
        std::vector<Interval> s;
        if (kind_ == Kind::atomic) {
            for (const auto& [v, w] : atoms_)
                if (w > 0) s.push_back({v, v});
        } else {
            for (std::size_t i = 0; i < values_.size(); ++i)
                if (values_[i] > 0) s.push_back({breaks_[i], breaks_[i + 1]});
        }
        return merge_intervals(std::move(s));
    }

    // M = max{|E| : E in supp}.
    double support_radius() const {
        double m = 0.0;
        for (const auto& iv : support()) m = std::max({m, std::abs(iv.lo), std::abs(iv.hi)});
        return m;
    }

    double mean() const {
        double acc = 0.0;
        if (kind_ == Kind::atomic) {
            for (const auto& [v, w] : atoms_) acc += v * w;
        } else {
            for (std::size_t i = 0; i < values_.size(); ++i)
                acc += values_[i] * 0.5 * (breaks_[i + 1] * breaks_[i + 1] - breaks_[i] * breaks_[i]);
        }
        return acc;
    }

    double variance() const {
        const double m = mean();
        double acc = 0.0;
        if (kind_ == Kind::atomic) {
            for (const auto& [v, w] : atoms_) acc += w * (v - m) * (v - m);
        } else {
            for (std::size_t i = 0; i < values_.size(); ++i) {
                const double a = breaks_[i] - m, b = breaks_[i + 1] - m;
                acc += values_[i] * (b * b * b - a * a * a) / 3.0;
            }
        }
        return acc;
    }

    // r_max (density case only).
    double density_max() const {
        require_density();
        double m = 0.0;
        for (double v : values_) m = std::max(m, v);
        return m;
    }

    double density_at(double x) const {
        require_density();
        if (x < breaks_.front() || x >= breaks_.back()) return 0.0;
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        const auto i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
        return values_[std::min(i, values_.size() - 1)];
    }

    // CDF of the density case, exact (piecewise linear).
    double cdf(double x) const {
        require_density();
        if (x <= breaks_.front()) return 0.0;
        if (x >= breaks_.back()) return 1.0;
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        const auto i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
        return cum_[i] + values_[i] * (x - breaks_[i]);
    }

    // Exact integral of r over [a, b].
    double mass_between(double a, double b) const {
        if (b <= a) return 0.0;
        return cdf(b) - cdf(a);
    }

    // Inverse CDF at u in [0, 1).
    double quantile(double u) const {
        if (kind_ == Kind::atomic) {
            const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
            const auto i = std::min(static_cast<std::size_t>(it - cum_.begin()), atoms_.size() - 1);
            return atoms_[i].first;
        }
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        auto i = static_cast<std::size_t>(it - cum_.begin());
        if (i > 0) --i;
        while (i < values_.size() && values_[i] <= 0.0) ++i;
        if (i >= values_.size()) return breaks_.back();
        return breaks_[i] + (u - cum_[i]) / values_[i];
    }

    double sample(std::uint64_t seed, std::uint64_t realization, std::int64_t site) const {
        return quantile(counter_uniform(seed, realization, site));
    }

  private:
    void require_density() const {
        if (kind_ != Kind::density)
            throw std::logic_error("SiteDistribution: density-only operation on atomic measure");
    }

    Kind kind_ = Kind::atomic;
    std::vector<std::pair<double, double>> atoms_;
    std::vector<double> breaks_, values_;
    std::vector<double> cum_;
};

}  // namespace anderson
