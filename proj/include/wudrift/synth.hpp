#pragma once

// Seeded Gaussian-mixture streams with ground truth. Drift is scripted as
// component displacements plus birth and death periods.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wudrift/core.hpp"
#include "wudrift/features.hpp"
#include "wudrift/strategies.hpp"

namespace wudrift {

// Periods are numbered from 1 in scenario files and in these structs.
struct GaussianComponent {
    std::string name;
    std::vector<double> mean;    // padded with zeros up to kFeatureCount
    std::vector<double> spread;  // one value (isotropic) or one per variable
    double weight = 1.0;
    std::optional<std::size_t> birth;  // first period the component is present
    std::optional<std::size_t> death;  // first period the component is absent
};

struct MoveEvent {
    std::size_t component = 0;  // index into components
    std::size_t period = 1;     // displacement applies from this period on
    std::vector<double> displacement;
};

struct DriftScenario {
    std::size_t periods = 1;
    std::size_t points_per_period = 100;
    std::uint64_t seed = 1;
    std::string start_month = "2002-07";  // label of period 1; later periods follow monthly
    std::vector<GaussianComponent> components;
    std::vector<MoveEvent> moves;

    // Throws Error("invalid_scenario") describing the first problem found.
    void validate() const;

    struct Active {
        std::size_t component;
        FeatureValues mean;
        FeatureValues spread;
        double weight;  // normalized over the period
    };
    // Components present in `period` with their displaced means.
    std::vector<Active> mixture(std::size_t period) const;

    std::string period_label(std::size_t period) const;
};

DriftScenario load_scenario(const std::filesystem::path& path);
DriftScenario parse_scenario(const std::string& json_text);

// The birth scenario used by the drift-detection checks: five isotropic unit
// components (three heavy, two light and far away), a sixth born at period 4
// next to the first one, six periods of 1000 points.
DriftScenario birth_scenario(std::uint64_t seed = 7);

struct SyntheticData {
    std::vector<FeatureVector> vectors;  // nav ids 1..N in period order
    std::vector<std::size_t> truth;      // generating component, parallel to vectors

    TemporalDataset dataset() const;
    // Ground-truth partition of one period (cluster = component index).
    Partition truth_partition(const std::string& label) const;
};

SyntheticData generate(const DriftScenario& scenario);

// Ground truth file: nav_id, sub_period, component.
void write_truth(const std::filesystem::path& path, const SyntheticData& data);

}  // namespace wudrift
