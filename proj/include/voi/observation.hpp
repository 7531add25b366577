#pragma once

// Synthetic observation generators: direct thickness measurements for
// inspections and noisy longitudinal strains from an affine surrogate of the
// structural response.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "voi/csv.hpp"
#include "voi/error.hpp"
#include "voi/matrix.hpp"
#include "voi/random.hpp"

namespace voi {

/// Per-sensor affine map from thickness loss (mm) to mean longitudinal strain (microstrain).
struct SurrogateModel {
    std::vector<double> intercepts;  // microstrain
    std::vector<double> slopes;      // microstrain per mm

    /// Six sensors, a_i = 200 + 10 i, b_i = -25 for i = 1..6.
    static SurrogateModel default_model() {
        SurrogateModel m;
        for (int i = 1; i <= 6; ++i) {
            m.intercepts.push_back(200.0 + 10.0 * i);
            m.slopes.push_back(-25.0);
        }
        return m;
    }

    [[nodiscard]] std::size_t sensors() const noexcept { return intercepts.size(); }

    void validate() const {
        require<ConfigError>(!intercepts.empty(), "surrogate: at least one sensor is required");
        require<ConfigError>(intercepts.size() == slopes.size(),
                             "surrogate: intercepts and slopes differ in length");
        for (std::size_t i = 0; i < intercepts.size(); ++i) {
            require<ConfigError>(std::isfinite(intercepts[i]) && std::isfinite(slopes[i]),
                                 "surrogate: coefficients must be finite");
        }
    }
};

struct NoiseSpec {
    double strain_sd = 5.0;       // microstrain
    double inspection_cov = 0.1;  // coefficient of variation of inspection readings

    void validate() const {
        require<ConfigError>(strain_sd > 0.0, "noise.strain_sd must be > 0");
        require<ConfigError>(inspection_cov > 0.0, "noise.inspection_cov must be > 0");
    }
};

enum class ObservationKind { Thickness, Strain };

/// Observations gathered at one acquisition time: rows are repeated readings,
/// columns are features (one for thickness, N_s for strain).
struct ObservationSet {
    std::size_t time_index = 0;
    double t_years = 0.0;
    ObservationKind kind = ObservationKind::Thickness;
    Matrix values;

    [[nodiscard]] std::size_t count() const noexcept { return values.rows(); }
    [[nodiscard]] std::size_t features() const noexcept { return values.cols(); }
};

inline ObservationSet generate_inspection_obs(double delta_tau, std::size_t n_obs, double cov, std::uint64_t seed) {
    if (!(delta_tau > 0.0)) {
        throw DomainError("inspection observations need delta_tau > 0");
    }
    require<ConfigError>(n_obs >= 1, "inspection: n_obs must be >= 1");
    require<ConfigError>(cov >= 0.0, "inspection: cov must be >= 0");
    Rng rng = make_rng(seed);
    ObservationSet set;
    set.kind = ObservationKind::Thickness;
    set.values = Matrix(n_obs, 1);
    const double sd = cov * delta_tau;
    for (std::size_t j = 0; j < n_obs; ++j) {
        set.values(j, 0) = delta_tau + sd * standard_normal(rng);
    }
    return set;
}

inline std::vector<double> strain_response(const SurrogateModel& model, double delta_tau) {
    std::vector<double> out(model.sensors());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = model.intercepts[i] + model.slopes[i] * delta_tau;
    }
    return out;
}

/// strain_sd is taken from the argument rather than NoiseSpec::validate so that the
/// noiseless limit (sd = 0) can be generated.
inline ObservationSet generate_strain_obs(const SurrogateModel& model, double delta_tau, std::size_t n_obs,
                                          const NoiseSpec& noise, std::uint64_t seed) {
    require<ConfigError>(n_obs >= 1, "strain: n_obs must be >= 1");
    require<ConfigError>(noise.strain_sd >= 0.0, "strain: strain_sd must be >= 0");
    const auto mean = strain_response(model, delta_tau);
    Rng rng = make_rng(seed);
    ObservationSet set;
    set.kind = ObservationKind::Strain;
    set.values = Matrix(n_obs, mean.size());
    for (std::size_t j = 0; j < n_obs; ++j) {
        for (std::size_t i = 0; i < mean.size(); ++i) {
            set.values(j, i) = mean[i] + noise.strain_sd * standard_normal(rng);
        }
    }
    return set;
}

struct TrainingPair {
    double delta_tau = 0.0;
    std::vector<double> strains;
};

/// Per-sensor ordinary least squares fit of strain = a + b * delta_tau.
inline SurrogateModel fit_surrogate(std::span<const TrainingPair> pairs) {
    require(!pairs.empty(), "fit_surrogate: no training pairs");
    const std::size_t sensors = pairs.front().strains.size();
    require(sensors >= 1, "fit_surrogate: pairs carry no strain values");
    double mean_x = 0.0;
    for (const auto& p : pairs) {
        require(p.strains.size() == sensors, "fit_surrogate: inconsistent sensor count");
        mean_x += p.delta_tau;
    }
    mean_x /= static_cast<double>(pairs.size());
    double sxx = 0.0;
    for (const auto& p : pairs) {
        sxx += (p.delta_tau - mean_x) * (p.delta_tau - mean_x);
    }
    if (!(sxx > 0.0)) {
        throw SingularDesignError("fit_surrogate: all delta_tau values are identical");
    }
    SurrogateModel model;
    model.intercepts.resize(sensors);
    model.slopes.resize(sensors);
    for (std::size_t i = 0; i < sensors; ++i) {
        double mean_y = 0.0;
        for (const auto& p : pairs) {
            mean_y += p.strains[i];
        }
        mean_y /= static_cast<double>(pairs.size());
        double sxy = 0.0;
        for (const auto& p : pairs) {
            sxy += (p.delta_tau - mean_x) * (p.strains[i] - mean_y);
        }
        model.slopes[i] = sxy / sxx;
        model.intercepts[i] = mean_y - model.slopes[i] * mean_x;
    }
    return model;
}

/// Reads `delta_tau_mm,s1,...,sN` training pairs.
inline std::vector<TrainingPair> read_training_pairs(const std::string& path) {
    const auto table = csv::read(path);
    require<ConfigError>(table.header.size() >= 2 && table.header[0] == "delta_tau_mm",
                         "training csv '" + path + "': header must start with delta_tau_mm");
    for (std::size_t i = 1; i < table.header.size(); ++i) {
        require<ConfigError>(table.header[i] == "s" + std::to_string(i),
                             "training csv '" + path + "': expected column s" + std::to_string(i));
    }
    std::vector<TrainingPair> pairs;
    pairs.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        require<ConfigError>(row.size() == table.header.size(),
                             "training csv '" + path + "': ragged row");
        TrainingPair p;
        p.delta_tau = csv::parse_double(row[0]);
        for (std::size_t i = 1; i < row.size(); ++i) {
            p.strains.push_back(csv::parse_double(row[i]));
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace voi
