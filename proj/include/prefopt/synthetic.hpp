#pragma once
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "prefopt/domain.hpp"

namespace prefopt {

// the expensive objective f2; implementations must be deterministic and finite
class BlackBoxObjective {
  public:
    virtual ~BlackBoxObjective() = default;
    virtual int dim() const = 0;
    virtual double evaluate(const Strategy& x) const = 0;
    virtual double cost_per_call() const { return 1.0; }
};

enum class Family { PowerSum, Coupled };

// analytically tractable stand-ins for the black-box performance objective:
//   PowerSum: f2(x) = sum_i w_i x_i^p_i / sum_i w_i
//   Coupled:  adds pairwise terms sum_{i<j} A_ij x_i x_j, same normalization
// both are monotone nondecreasing per coordinate with f2(0)=0, f2(1)=1
struct SyntheticSpec {
    Family family = Family::PowerSum;
    std::vector<double> weights;
    std::vector<double> exponents;
    std::vector<std::vector<double>> interaction;
    std::uint64_t seed = 0;

    int dim() const { return static_cast<int>(weights.size()); }
    void validate() const;
    double evaluate(const Strategy& x) const;

    static SyntheticSpec random(std::uint64_t seed, Family family, int d);
};

class SyntheticObjective : public BlackBoxObjective {
  public:
    explicit SyntheticObjective(SyntheticSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
    }
    int dim() const override { return spec_.dim(); }
    double evaluate(const Strategy& x) const override { return spec_.evaluate(x); }
    const SyntheticSpec& spec() const { return spec_; }

  private:
    SyntheticSpec spec_;
};

// budget accounting; keys are strategies quantized to 12 decimal digits
struct EvalLedger {
    std::map<std::vector<long long>, double> cache;
    long long true_evaluations = 0;
    long long cache_hits = 0;

    bool cached(const Strategy& x) const;
};

std::vector<long long> quantize_key(const Strategy& x);

double evaluate_true(const BlackBoxObjective& obj, const Strategy& x, EvalLedger& ledger);

struct OraclePoint {
    Strategy x;
    ObjectivePair f;
};

// ground-truth nondominated front of (f1, f2), used by acceptance tests.
// PowerSum: exact dynamic program over a per-coordinate value grid (separable);
// Coupled and other small-d cases: exhaustive grid enumeration.
std::vector<OraclePoint> pareto_oracle(const SyntheticSpec& spec, int grid_resolution);

} // namespace prefopt
