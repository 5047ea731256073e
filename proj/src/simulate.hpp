#ifndef LSPCM_SIMULATE_HPP
#define LSPCM_SIMULATE_HPP

#include "common.hpp"
#include "distributions.hpp"
#include "netdata.hpp"

#include <string>

namespace lspcm::simulate {

struct ScenarioSpec {
    std::string name;
    int n = 50;
    Vector delta;        // length p*
    Matrix means;        // G* x p*
    double alpha = 6.0;
    double weight_concentration = 10.0;
    bool literal_means = false;  // scenario 1 only: keep the duplicated third mean

    int dims() const { return static_cast<int>(delta.size()); }
    int clusters() const { return static_cast<int>(means.rows()); }
    void validate() const;
};

struct PlantedTruth {
    Matrix Z;
    Labels labels;  // 0-based
    Vector tau;
    ScenarioSpec spec;
    double density = 0.0;
};

/// n = 50, delta = (1, 1.05), alpha = 6. The published mean list repeats
/// (-4, 0); by default the third mean is (-4, 4) so the three clusters are
/// separated, and `literal` keeps the list as printed.
ScenarioSpec scenario1(bool literal = false);

/// n = 200, delta = (1, 1.1, 1.05, 1.02), seven 4-d means, alpha = 20.
ScenarioSpec scenario2();

std::vector<ScenarioSpec> builtin_scenarios(bool literal = false);

/// tau ~ Dir(10,...), labels ~ tau, z_i ~ MVN(mu_c, Omega^-1) with omega the
/// cumulative product of delta, then arcs from the logistic distance model.
std::pair<netdata::AdjacencyMatrix, PlantedTruth> generate(const ScenarioSpec& spec, dist::Rng& rng);

}  // namespace lspcm::simulate

#endif
