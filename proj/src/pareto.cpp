#include "prefopt/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prefopt/parallel.hpp"

namespace prefopt {

std::vector<FrontPoint> nondominated(const std::vector<FrontPoint>& points) {
    const size_t n = points.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (points[a].first != points[b].first) return points[a].first < points[b].first;
        return points[a].second < points[b].second;
    });
    std::vector<FrontPoint> out;
    double best = std::numeric_limits<double>::infinity();
    double best_f1 = -std::numeric_limits<double>::infinity();
    for (size_t i : order) {
        double f1 = points[i].first, f2 = points[i].second;
        bool dominated = f2 > best || (f2 == best && f1 > best_f1);
        if (dominated) continue;
        out.emplace_back(f1, f2);
        if (f2 < best) {
            best = f2;
            best_f1 = f1;
        }
    }
    return out;
}

namespace {

// nondominated points inside the reference box: ascending f1, strictly
// descending f2
std::vector<FrontPoint> staircase(const std::vector<FrontPoint>& points, FrontPoint ref) {
    std::vector<FrontPoint> in;
    in.reserve(points.size());
    for (const auto& p : points)
        if (p.first < ref.first && p.second < ref.second) in.push_back(p);
    std::sort(in.begin(), in.end());
    std::vector<FrontPoint> st;
    for (const auto& p : in)
        if (st.empty() || p.second < st.back().second) st.push_back(p);
    return st;
}

double hv_staircase(const std::vector<FrontPoint>& st, FrontPoint ref) {
    double area = 0.0;
    for (size_t i = 0; i < st.size(); ++i) {
        double next_f1 = i + 1 < st.size() ? st[i + 1].first : ref.first;
        area += (next_f1 - st[i].first) * (ref.second - st[i].second);
    }
    return area;
}

// area the candidate adds beyond what the staircase already dominates
double hvi_on_staircase(const std::vector<FrontPoint>& st, FrontPoint ref, FrontPoint c) {
    if (c.first >= ref.first || c.second >= ref.second) return 0.0;
    auto it = std::upper_bound(st.begin(), st.end(), c.first,
                               [](double v, const FrontPoint& p) { return v < p.first; });
    // height of the existing dominated region at abscissa c.f1
    double h = (it == st.begin()) ? ref.second : std::prev(it)->second;
    if (h <= c.second) return 0.0;
    double area = 0.0;
    double x = c.first;
    while (true) {
        double next_x = (it == st.end()) ? ref.first : it->first;
        area += (next_x - x) * (h - c.second);
        if (it == st.end()) break;
        h = it->second;
        if (h <= c.second) break;
        x = next_x;
        ++it;
    }
    return area;
}

} // namespace

double hypervolume(const FrontSet& fs) {
    return hv_staircase(staircase(fs.points, fs.reference), fs.reference);
}

double hvi(const FrontSet& existing, const std::vector<FrontPoint>& candidates) {
    auto st = staircase(existing.points, existing.reference);
    if (candidates.size() == 1)
        return hvi_on_staircase(st, existing.reference, candidates[0]);
    FrontSet merged = existing;
    merged.points.insert(merged.points.end(), candidates.begin(), candidates.end());
    double delta = hypervolume(merged) - hv_staircase(st, existing.reference);
    return delta > 0.0 ? delta : 0.0;
}

void marginal_hvi_serial(const FrontSet& existing, const std::vector<FrontPoint>& pool,
                         const std::vector<char>& taken, std::vector<double>& out) {
    auto st = staircase(existing.points, existing.reference);
    out.assign(pool.size(), 0.0);
    for (size_t i = 0; i < pool.size(); ++i)
        if (!taken[i]) out[i] = hvi_on_staircase(st, existing.reference, pool[i]);
}

void marginal_hvi_parallel(const FrontSet& existing, const std::vector<FrontPoint>& pool,
                           const std::vector<char>& taken, std::vector<double>& out) {
    auto st = staircase(existing.points, existing.reference);
    out.assign(pool.size(), 0.0);
    const int n = static_cast<int>(pool.size());
    // each iteration writes its own slot, so the result is identical for any
    // thread count
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (int i = 0; i < n; ++i) {
        if (!taken[i]) out[i] = hvi_on_staircase(st, existing.reference, pool[i]);
    }
}

std::vector<int> select_batch(const FrontSet& existing, const std::vector<FrontPoint>& pool,
                              int batch) {
    const int n = static_cast<int>(pool.size());
    FrontSet cur = existing;
    std::vector<char> taken(n, 0);
    std::vector<int> chosen;
    std::vector<double> marg;
    const int take = std::min(batch, n);
    for (int round = 0; round < take; ++round) {
        marginal_hvi_parallel(cur, pool, taken, marg);
        int best = -1;
        for (int i = 0; i < n; ++i) {
            if (taken[i]) continue;
            if (best < 0 || marg[i] > marg[best] ||
                (marg[i] == marg[best] && pool[i].second < pool[best].second))
                best = i;
        }
        if (marg[best] <= 0.0) {
            best = -1;
            for (int i = 0; i < n; ++i) {
                if (taken[i]) continue;
                if (best < 0 || pool[i].second < pool[best].second) best = i;
            }
        }
        taken[best] = 1;
        chosen.push_back(best);
        cur.points.push_back(pool[best]);
    }
    return chosen;
}

} // namespace prefopt
