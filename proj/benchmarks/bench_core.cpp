#include <benchmark/benchmark.h>

#include "qcrl/gradients.hpp"
#include "qcrl/levelset.hpp"
#include "qcrl/models.hpp"
#include "qcrl/rng.hpp"

using namespace qcrl;

namespace {

std::vector<ParamVector> sample_params(const GatePreset& gp, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ParamVector> a;
    for (const auto& c : gp.model.controls) {
        ParamVector v(c.basis.param_count());
        for (auto& x : v) x = rng.uniform(-0.2, 0.2);
        v[0] += M_PI * M_PI / c.basis.gate_time;
        a.push_back(std::move(v));
    }
    return a;
}

void bm_propagate(benchmark::State& state) {
    const auto gp = preset("sq_x_z", default_basis());
    const auto a = sample_params(gp, 1);
    Trajectory traj;
    for (auto _ : state) {
        propagate_into(traj, gp.model, a, static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(traj.grid_data());
    }
}
BENCHMARK(bm_propagate)->Arg(512)->Arg(1024);

void bm_s1(benchmark::State& state) {
    const auto gp = preset("sq_x_z", default_basis());
    const auto a = sample_params(gp, 1);
    const Trajectory traj = propagate(gp.model, a, 1024);
    for (auto _ : state) {
        benchmark::DoNotOptimize(s1(traj, gp.model.noises.front().op).s1);
    }
}
BENCHMARK(bm_s1);

void bm_s2(benchmark::State& state) {
    const auto gp = preset("sq_x_z", default_basis());
    const auto a = sample_params(gp, 1);
    const Trajectory traj = propagate(gp.model, a, 1024);
    for (auto _ : state) {
        benchmark::DoNotOptimize(s2(traj, gp.model.noises.front().op).s2);
    }
}
BENCHMARK(bm_s2);

void bm_grad_bundle(benchmark::State& state) {
    const auto gp = preset("sq_x_z", default_basis());
    const auto a = sample_params(gp, 1);
    std::vector<ScalarFunctional> fns{ScalarFunctional::theta(gp.desired),
                                      ScalarFunctional::s1_of(0)};
    GradOptions opt;
    opt.steps = 512;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grad_bundle(fns, gp.model, a, opt));
    }
}
BENCHMARK(bm_grad_bundle);

void bm_gov_step(benchmark::State& state) {
    Rng rng(2);
    ParamVector gt(18);
    for (auto& x : gt) x = rng.normal();
    std::vector<ParamVector> cons(5, ParamVector(18));
    for (auto& c : cons) {
        for (auto& x : c) x = rng.normal();
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(gov_step(gt, cons, 1e-3));
    }
}
BENCHMARK(bm_gov_step);

}  // namespace
