#pragma once

// Logistic-type corrosion thickness loss model, its parameter prior, and the
// prior process over the monitoring time grid.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voi/error.hpp"
#include "voi/matrix.hpp"
#include "voi/random.hpp"

namespace voi {

/// Nominal as-built plate thickness used for fraction-of-nominal presentation.
inline constexpr double kNominalPlateThicknessMm = 14.0;

struct DeteriorationParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;  // mm

    [[nodiscard]] bool valid() const noexcept {
        return alpha > 0.0 && beta > 0.0 && gamma > 0.0 && std::isfinite(alpha) &&
               std::isfinite(beta) && std::isfinite(gamma);
    }
    /// Long-run thickness loss gamma / alpha in mm.
    [[nodiscard]] double asymptote() const noexcept { return gamma / alpha; }

    friend bool operator==(const DeteriorationParams&, const DeteriorationParams&) = default;
};

struct UniformBounds {
    double lo = 0.0;
    double hi = 1.0;

    void validate(const std::string& name) const {
        require<ConfigError>(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
                             name + ": uniform bounds need lo < hi");
    }
    [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    [[nodiscard]] double width() const noexcept { return hi - lo; }
};

struct NormalDist {
    double mean = 0.0;
    double sd = 1.0;

    void validate(const std::string& name) const {
        require<ConfigError>(std::isfinite(mean) && std::isfinite(sd) && sd > 0.0,
                             name + ": normal sd must be > 0");
    }
};

struct PriorSpec {
    UniformBounds alpha{4.0, 13.0};
    NormalDist beta{250.0, 50.0};  // truncated to beta > 0
    UniformBounds gamma{4.0, 8.5};

    void validate() const {
        alpha.validate("prior.alpha");
        beta.validate("prior.beta");
        gamma.validate("prior.gamma");
        require<ConfigError>(alpha.lo > 0.0, "prior.alpha: lower bound must be > 0");
        require<ConfigError>(gamma.lo > 0.0, "prior.gamma: lower bound must be > 0");
    }
};

/// Acquisition / decision grid in absolute vessel years.
struct TimeGrid {
    double t0 = 10.0;
    double horizon = 8.0;
    double step = 0.25;
    std::vector<double> points;

    /// Regular grid t0 + k * step for k = 1..floor(horizon / step).
    static TimeGrid regular(double t0, double horizon, double step) {
        require<ConfigError>(std::isfinite(t0), "grid.t0 must be finite");
        require<ConfigError>(horizon >= 0.0, "grid.horizon must be >= 0");
        require<ConfigError>(step > 0.0, "grid.step must be > 0");
        TimeGrid grid{t0, horizon, step, {}};
        const auto count = static_cast<std::size_t>(std::floor(horizon / step + 1e-9));
        grid.points.reserve(count);
        for (std::size_t k = 1; k <= count; ++k) {
            grid.points.push_back(t0 + static_cast<double>(k) * step);
        }
        return grid;
    }

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }

    /// Index of the grid point equal to t (within 1e-9 y), or size() if absent.
    [[nodiscard]] std::size_t index_of(double t) const noexcept {
        for (std::size_t k = 0; k < points.size(); ++k) {
            if (std::abs(points[k] - t) < 1e-9) {
                return k;
            }
        }
        return points.size();
    }

    void validate() const {
        for (std::size_t k = 0; k < points.size(); ++k) {
            require<ConfigError>(points[k] >= t0, "grid: points must not precede t0");
            if (k > 0) {
                require<ConfigError>(points[k] > points[k - 1], "grid: points must be strictly increasing");
            }
        }
    }
};

/// Thickness loss in mm at absolute time t for corrosion onset t0.
inline double evaluate_deterioration(const DeteriorationParams& params, double t, double t0) {
    if (!(t >= t0)) {
        throw DomainError("deterioration is undefined before corrosion onset (t < t0)");
    }
    return params.gamma / (params.alpha + params.beta * std::exp(-(t - t0)));
}

inline DeteriorationParams sample_prior_one(const PriorSpec& spec, Rng& rng) {
    DeteriorationParams p;
    p.alpha = uniform(rng, spec.alpha.lo, spec.alpha.hi);
    do {
        p.beta = spec.beta.mean + spec.beta.sd * standard_normal(rng);
    } while (!(p.beta > 0.0));
    p.gamma = uniform(rng, spec.gamma.lo, spec.gamma.hi);
    return p;
}

inline std::vector<DeteriorationParams> sample_prior(const PriorSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    require<ConfigError>(n >= 1, "sample_prior: n must be >= 1");
    Rng rng = make_rng(seed);
    std::vector<DeteriorationParams> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(sample_prior_one(spec, rng));
    }
    return out;
}

inline std::vector<double> trajectory(const DeteriorationParams& params, const TimeGrid& grid) {
    std::vector<double> row(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        row[k] = evaluate_deterioration(params, grid.points[k], grid.t0);
    }
    return row;
}

/// Prior process realizations, one row per parameter set.
inline Matrix generate_trajectories(std::span<const DeteriorationParams> params_list, const TimeGrid& grid) {
    require(!params_list.empty(), "generate_trajectories: params_list is empty");
    Matrix out(params_list.size(), grid.size());
    for (std::size_t n = 0; n < params_list.size(); ++n) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            out(n, k) = evaluate_deterioration(params_list[n], grid.points[k], grid.t0);
        }
    }
    return out;
}

}  // namespace voi
