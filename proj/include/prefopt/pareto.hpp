#pragma once
#include <utility>
#include <vector>

namespace prefopt {

using FrontPoint = std::pair<double, double>; // (f1, f2)

struct FrontSet {
    std::vector<FrontPoint> points;
    FrontPoint reference{1.1, 1.1};
};

// minimal mutually nondominated subset (componentwise <= with one strict),
// stable order by f1; exact duplicates are all kept
std::vector<FrontPoint> nondominated(const std::vector<FrontPoint>& points);

// exact 2-D hypervolume by the sweep method
double hypervolume(const FrontSet& fs);

// HV(existing + candidates) - HV(existing); 0 when every candidate is dominated
double hvi(const FrontSet& existing, const std::vector<FrontPoint>& candidates);

// greedy batch selection maximizing marginal HVI; ties go to smaller f2,
// then lower pool index; exhausted improvement falls back to smallest f2.
// Returns pool indices in selection order.
std::vector<int> select_batch(const FrontSet& existing, const std::vector<FrontPoint>& pool,
                              int batch);

// marginal HVI of each candidate against a fixed front, used inside one
// greedy round; the parallel variant must match the serial one bitwise
void marginal_hvi_serial(const FrontSet& existing, const std::vector<FrontPoint>& pool,
                         const std::vector<char>& taken, std::vector<double>& out);
void marginal_hvi_parallel(const FrontSet& existing, const std::vector<FrontPoint>& pool,
                           const std::vector<char>& taken, std::vector<double>& out);

} // namespace prefopt
