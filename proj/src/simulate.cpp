#include "simulate.hpp"

#include "model.hpp"

namespace lspcm::simulate {

void ScenarioSpec::validate() const {
    if (n < 2) throw UsageError("scenario needs at least two nodes");
    if (delta.size() < 1) throw UsageError("scenario needs at least one dimension");
    if (!(delta[0] > 0.0)) throw UsageError("delta_1 must be positive");
    for (Eigen::Index h = 1; h < delta.size(); ++h)
        if (delta[h] < 1.0) throw UsageError("delta_h must be at least 1 for h >= 2");
    if (means.rows() < 1 || means.cols() != delta.size()) throw UsageError("means must be G* x p*");
    if (!(weight_concentration > 0.0)) throw UsageError("weight concentration must be positive");
    if (!std::isfinite(alpha)) throw UsageError("alpha must be finite");
}

ScenarioSpec scenario1(bool literal) {
    ScenarioSpec s;
    s.name = literal ? "scenario1-literal" : "scenario1";
    s.n = 50;
    s.delta = Vector(2);
    s.delta << 1.0, 1.05;
    s.means = Matrix(3, 2);
    s.means << 0, 0, -4, 0, -4, literal ? 0 : 4;
    s.alpha = 6.0;
    s.literal_means = literal;
    return s;
}

ScenarioSpec scenario2() {
    ScenarioSpec s;
    s.name = "scenario2";
    s.n = 200;
    s.delta = Vector(4);
    s.delta << 1.0, 1.1, 1.05, 1.02;
    s.means = Matrix(7, 4);
    s.means << -5, 0, 0, 0,  //
        -5, 5, 0, 0,         //
        0, -5, 5, 0,         //
        0, 0, -5, 5,         //
        2, 0, 2, -5,         //
        -2, 2, -2, 0,        //
        0, -2, 0, 0;
    s.alpha = 20.0;
    return s;
}

std::vector<ScenarioSpec> builtin_scenarios(bool literal) { return {scenario1(literal), scenario2()}; }

std::pair<netdata::AdjacencyMatrix, PlantedTruth> generate(const ScenarioSpec& spec, dist::Rng& rng) {
    spec.validate();
    PlantedTruth t;
    t.spec = spec;
    t.tau = dist::sample_dirichlet(Vector::Constant(spec.clusters(), spec.weight_concentration), rng);
    t.labels.resize(spec.n);
    for (auto& c : t.labels) c = dist::sample_categorical(t.tau, rng);
    const Vector omega = model::recompute_omega(spec.delta);
    t.Z.resize(spec.n, spec.dims());
    for (int i = 0; i < spec.n; ++i)
        t.Z.row(i) = dist::sample_diag_mvn(spec.means.row(t.labels[i]).transpose(), omega, rng).transpose();
    auto y = model::simulate_network(t.Z, spec.alpha, rng);
    t.density = netdata::density(y);
    return {std::move(y), std::move(t)};
}

}  // namespace lspcm::simulate
