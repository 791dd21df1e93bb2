#include "siav/arith.hpp"
#include "siav/cm_field.hpp"
#include "siav/ec.hpp"
#include "siav/quadratic.hpp"
#include "siav/weil.hpp"

#include <benchmark/benchmark.h>

using namespace siav;

static void BM_IsPrime256(benchmark::State& state) {
    Int x("321438704914423479101766132343967029098");
    Int p = x * x + x + 1;
    for (auto _ : state) benchmark::DoNotOptimize(is_prime(p));
}
BENCHMARK(BM_IsPrime256);

static void BM_Census(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(ec::isogeny_class_census(state.range(0)));
}
BENCHMARK(BM_Census)->Arg(97)->Arg(199);

static void BM_ClassNumber(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(quad::class_number_imaginary(-state.range(0)));
}
BENCHMARK(BM_ClassNumber)->Arg(10007)->Arg(100003);

static void BM_BatemanHorn(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(ec::bateman_horn_constant(3, state.range(0)));
}
BENCHMARK(BM_BatemanHorn)->Arg(100000)->Arg(1000000);

static void BM_ScalarMul256(benchmark::State& state) {
    Int x("321438704914423479101766132343967029098");
    Int p = x * x + x + 1, N = x * x - x + 1;
    auto c = ec::construct_curve(3, p, N);
    ec::PointSampler s(c, 1);
    auto P = s.next();
    for (auto _ : state) benchmark::DoNotOptimize(ec::ec_scalar_mul(c, P, N));
}
BENCHMARK(BM_ScalarMul256);

static void BM_WeilSearchZeta5(benchmark::State& state) {
    auto reg = cm::load_field_registry_file(cm::default_registry_path());
    const cm::CMFieldData* z5 = nullptr;
    for (const auto& f : reg)
        if (f.id == "zeta5") z5 = &f;
    weil::WeilSearchParams p;
    p.field = z5;
    p.p_max = Int(1) << 64;
    for (auto _ : state) benchmark::DoNotOptimize(weil::search(p));
}
BENCHMARK(BM_WeilSearchZeta5);

BENCHMARK_MAIN();
