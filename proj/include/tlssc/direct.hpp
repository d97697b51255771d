#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "tlssc/errors.hpp"

namespace tlssc {

using Objective = std::function<double(const std::vector<double>&)>;

inline constexpr double kNonFinitePenalty = 1e30;

// One hyperrectangle of the unit-cube partition. Side lengths are exact
// powers of 3 tracked by an integer division level per dimension, so
// diameters compare exactly across rectangles.
struct HyperRect {
    std::vector<double> center;  // unit-cube coordinates
    std::vector<int> levels;     // side_i = 3^-levels[i]
    double f_center = 0;
    double diameter = 0;  // Euclidean norm of the half-sides
    std::size_t index = 0;  // creation order, used for deterministic ties

    double side(std::size_t d) const { return std::pow(3.0, -levels[d]); }

    void update_diameter() {
        double sum = 0;
        for (int lv : levels) {
            double half = 0.5 * std::pow(3.0, -lv);
            sum += half * half;
        }
        diameter = std::sqrt(sum);
    }
};

struct OptimizerConfig {
    int max_evals = 2000;
    double epsilon = 1e-4;
};

struct MinimizeResult {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    int evals = 0;
};

namespace direct_detail {

// Per-diameter minima, sorted by diameter ascending. Ties on (diameter, f)
// resolve to the lowest creation index.
inline std::vector<std::size_t> diameter_class_minima(const std::vector<HyperRect>& rects) {
    std::vector<std::size_t> order(rects.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rects[a].diameter != rects[b].diameter) return rects[a].diameter < rects[b].diameter;
        if (rects[a].f_center != rects[b].f_center) return rects[a].f_center < rects[b].f_center;
        return rects[a].index < rects[b].index;
    });
    std::vector<std::size_t> minima;
    for (std::size_t i : order) {
        if (!minima.empty() && rects[i].diameter <= rects[minima.back()].diameter * (1 + 1e-12))
            continue;  // same class; first hit is the minimum
        minima.push_back(i);
    }
    return minima;
}

}  // namespace direct_detail

// Lower-right convex hull of (diameter, f_center) with the epsilon
// improvement condition f_c - K*d <= f_min - eps*|f_min|. The largest
// diameter class's minimum is always selected.
inline std::vector<std::size_t> select_potentially_optimal(const std::vector<HyperRect>& rects,
                                                           double f_min, double epsilon) {
    if (rects.empty()) throw DataError("select_potentially_optimal: empty set");
    auto cand = direct_detail::diameter_class_minima(rects);
    const double threshold = f_min - (f_min != 0 ? epsilon * std::abs(f_min) : 1e-8);
    std::vector<std::size_t> selected;
    for (std::size_t j = 0; j < cand.size(); ++j) {
        const auto& rj = rects[cand[j]];
        double max_lo = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < j; ++i) {
            const auto& ri = rects[cand[i]];
            max_lo = std::max(max_lo, (rj.f_center - ri.f_center) / (rj.diameter - ri.diameter));
        }
        double min_hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = j + 1; i < cand.size(); ++i) {
            const auto& ri = rects[cand[i]];
            min_hi = std::min(min_hi, (ri.f_center - rj.f_center) / (ri.diameter - rj.diameter));
        }
        if (max_lo > min_hi) continue;            // no feasible Lipschitz slope
        if (std::max(max_lo, 0.0) > min_hi) continue;  // K must be >= 0
        if (j + 1 == cand.size()) {
            selected.push_back(cand[j]);  // largest class: K unbounded above
            continue;
        }
        if (rj.f_center - min_hi * rj.diameter <= threshold) selected.push_back(cand[j]);
    }
    if (selected.empty()) selected.push_back(cand.back());
    return selected;
}

// Trisects `rect` along all of its longest dimensions, sampling
// center +- side/3 in each and splitting the best-valued dimension first
// (Jones ordering). Children tile the parent exactly. The center child is
// last in the returned list; creation indices are assigned by the caller.
inline std::vector<HyperRect> trisect(const HyperRect& rect, const Objective& objective, int& evals) {
    int min_level = *std::min_element(rect.levels.begin(), rect.levels.end());
    std::vector<std::size_t> long_dims;
    for (std::size_t d = 0; d < rect.levels.size(); ++d)
        if (rect.levels[d] == min_level) long_dims.push_back(d);
    const double delta = std::pow(3.0, -min_level) / 3.0;

    struct Probe {
        std::size_t dim;
        double f_minus, f_plus, w;
    };
    std::vector<Probe> probes;
    auto eval = [&](std::vector<double> x) {
        double f = objective(x);
        ++evals;
        return std::isfinite(f) ? f : kNonFinitePenalty;
    };
    for (std::size_t d : long_dims) {
        auto xm = rect.center, xp = rect.center;
        xm[d] -= delta;
        xp[d] += delta;
        double fm = eval(xm), fp = eval(xp);
        probes.push_back({d, fm, fp, std::min(fm, fp)});
    }
    std::stable_sort(probes.begin(), probes.end(),
                     [](const Probe& a, const Probe& b) { return a.w < b.w; });

    std::vector<HyperRect> children;
    HyperRect middle = rect;
    for (const auto& pr : probes) {
        middle.levels[pr.dim] += 1;
        HyperRect lo = middle, hi = middle;
        lo.center[pr.dim] -= delta;
        lo.f_center = pr.f_minus;
        hi.center[pr.dim] += delta;
        hi.f_center = pr.f_plus;
        lo.update_diameter();
        hi.update_diameter();
        children.push_back(std::move(lo));
        children.push_back(std::move(hi));
    }
    middle.update_diameter();
    children.push_back(middle);
    return children;
}

// Deterministic DIRECT minimization over a box. The first evaluation is
// always the box center; the loop stops once max_evals is reached (each
// iteration may overshoot by at most 2*dim evaluations).
inline MinimizeResult minimize(const Objective& objective,
                               const std::vector<std::pair<double, double>>& bounds,
                               const OptimizerConfig& config = {}) {
    const std::size_t dim = bounds.size();
    if (dim == 0) throw DataError("minimize: empty bounds");
    for (const auto& [lo, hi] : bounds)
        if (!(lo < hi)) throw DataError("minimize: invalid bounds (lo must be < hi)");
    if (config.max_evals < 1) throw DataError("minimize: max_evals must be >= 1");

    MinimizeResult result;
    auto denorm = [&](const std::vector<double>& c) {
        std::vector<double> x(dim);
        for (std::size_t d = 0; d < dim; ++d) x[d] = bounds[d].first + c[d] * (bounds[d].second - bounds[d].first);
        return x;
    };
    auto track = [&](const HyperRect& r) {
        if (r.f_center < result.f) {
            result.f = r.f_center;
            result.x = denorm(r.center);
        }
    };
    Objective unit_objective = [&](const std::vector<double>& c) { return objective(denorm(c)); };

    std::vector<HyperRect> rects;
    std::size_t next_index = 0;
    {
        HyperRect root;
        root.center.assign(dim, 0.5);
        root.levels.assign(dim, 0);
        root.update_diameter();
        double f = unit_objective(root.center);
        ++result.evals;
        root.f_center = std::isfinite(f) ? f : kNonFinitePenalty;
        root.index = next_index++;
        track(root);
        rects.push_back(std::move(root));
    }

    while (result.evals < config.max_evals) {
        auto selected = select_potentially_optimal(rects, result.f, config.epsilon);
        // remove in descending position so indices stay valid
        std::sort(selected.rbegin(), selected.rend());
        std::vector<HyperRect> parents;
        for (std::size_t idx : selected) {
            parents.push_back(std::move(rects[idx]));
            rects.erase(rects.begin() + static_cast<std::ptrdiff_t>(idx));
        }
        // process in selection (ascending diameter) order for determinism
        std::reverse(parents.begin(), parents.end());
        for (auto& parent : parents) {
            auto children = trisect(parent, unit_objective, result.evals);
            for (auto& c : children) {
                c.index = next_index++;
                track(c);
                rects.push_back(std::move(c));
            }
            if (result.evals >= config.max_evals) break;
        }
    }
    return result;
}

}  // namespace tlssc
