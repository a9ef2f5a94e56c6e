#include <benchmark/benchmark.h>

#include "mmqo/cost.hpp"
#include "mmqo/error_monitor.hpp"
#include "mmqo/gcd.hpp"
#include "mmqo/generator.hpp"
#include "mmqo/plan_text.hpp"
#include "mmqo/proposer.hpp"
#include "mmqo/rewrite.hpp"

using namespace mmqo;

namespace {

const Catalog &catalog() {
    static Catalog c = example_catalog();
    return c;
}

const CostParams &params() {
    static CostParams p = CostParams::defaults();
    return p;
}

PlanPtr bench_plan(std::uint64_t seed) {
    static GeneratorLimits limits;
    return generate_query(seed, catalog(), limits);
}

} // namespace

static void BM_ParsePlan(benchmark::State &state) {
    std::string text = serialize_plan(bench_plan(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_plan(text));
    }
}
BENCHMARK(BM_ParsePlan);

static void BM_SerializePlan(benchmark::State &state) {
    PlanPtr plan = bench_plan(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(serialize_plan(plan));
    }
}
BENCHMARK(BM_SerializePlan);

static void BM_Canonicalize(benchmark::State &state) {
    PlanPtr plan = bench_plan(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(canonicalize(*plan));
    }
}
BENCHMARK(BM_Canonicalize);

static void BM_PlanCost(benchmark::State &state) {
    PlanPtr plan = bench_plan(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(plan_cost(*plan, catalog(), params()));
    }
}
BENCHMARK(BM_PlanCost);

static void BM_CheckError(benchmark::State &state) {
    PlanPtr plan = bench_plan(4);
    SimilarityChecker similarity;
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_error(*plan, *plan, catalog(), similarity));
    }
}
BENCHMARK(BM_CheckError);

static void BM_SentenceSimilarityUncached(benchmark::State &state) {
    for (auto _ : state) {
        SimilarityChecker similarity; // fresh cache each round
        benchmark::DoNotOptimize(similarity.compare("how many persons", "how many people"));
        benchmark::DoNotOptimize(similarity.compare("men", "women"));
    }
}
BENCHMARK(BM_SentenceSimilarityUncached);

static void BM_AllRewrites(benchmark::State &state) {
    PlanPtr plan = bench_plan(5);
    SimilarityChecker similarity;
    for (auto _ : state) {
        benchmark::DoNotOptimize(all_rewrites(*plan, catalog(), params(), similarity));
    }
}
BENCHMARK(BM_AllRewrites);

static void BM_GreedyDescent(benchmark::State &state) {
    PlanPtr plan = bench_plan(static_cast<std::uint64_t>(state.range(0)));
    SimilarityChecker similarity;
    for (auto _ : state) {
        GreedyRuleProposer greedy(catalog(), params(), similarity);
        GcdResult r = run_gcd(plan, greedy, catalog(), params(), similarity, {});
        benchmark::DoNotOptimize(r.best_cost);
    }
}
BENCHMARK(BM_GreedyDescent)->Arg(6)->Arg(7)->Arg(8);

static void BM_ClosureMinimum(benchmark::State &state) {
    PlanPtr plan = bench_plan(static_cast<std::uint64_t>(state.range(0)));
    SimilarityChecker similarity;
    ExhaustiveRuleProposer oracle(catalog(), params(), similarity, 12);
    for (auto _ : state) {
        std::size_t states_explored = 0;
        benchmark::DoNotOptimize(oracle.closure_minimum(plan, &states_explored));
        state.counters["states"] = static_cast<double>(states_explored);
    }
}
BENCHMARK(BM_ClosureMinimum)->Arg(6)->Arg(7)->Arg(8);

static void BM_GenerateQuery(benchmark::State &state) {
    GeneratorLimits limits;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_query(seed++, catalog(), limits));
    }
}
BENCHMARK(BM_GenerateQuery);

BENCHMARK_MAIN();
