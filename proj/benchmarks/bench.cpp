#include <benchmark/benchmark.h>

#include "growthlab/constructions.hpp"
#include "growthlab/decompose.hpp"
#include "growthlab/expansion.hpp"
#include "growthlab/groupaction.hpp"

using namespace growthlab;

static void BM_ImageSizeStructured(benchmark::State& state) {
  const long n = state.range(0);
  const FiniteSet a = FiniteSet::integer_range(0, n - 1);
  const PolyFamily fam = gen_structured_family(ClassKind::additive, UniPoly::identity(), parse_uni("x^2"), a);
  const unsigned threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(image_size(fam, a, threads));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_ImageSizeStructured)->Args({100, 1})->Args({300, 1})->Args({300, 4})->Unit(benchmark::kMillisecond);

static void BM_ImageSizeMulti(benchmark::State& state) {
  const MultiPoly f = parse_poly("x^2 + x*y0 + y0^2", 2);
  const FiniteSet a = FiniteSet::integer_range(1, state.range(0));
  const std::vector<FiniteSet> bs{a};
  for (auto _ : state) benchmark::DoNotOptimize(image_size_multi(f, a, bs, static_cast<unsigned>(state.range(1))));
}
BENCHMARK(BM_ImageSizeMulti)->Args({200, 1})->Args({400, 1})->Args({400, 4})->Unit(benchmark::kMillisecond);

static void BM_ActIncidence(benchmark::State& state) {
  const auto act = make_action(ActionKind::cyclic, 10007);
  std::vector<Code> s, a;
  for (Code i = 0; i < 100; ++i) s.push_back(i);
  for (Code i = 0; i < static_cast<Code>(state.range(0)); ++i) a.push_back(i);
  const ActionSubset S = ActionSubset::group_side(s);
  const ActionSubset A = ActionSubset::point_side(a);
  for (auto _ : state) benchmark::DoNotOptimize(act_incidence(*act, S, A, A, static_cast<unsigned>(state.range(1))));
}
BENCHMARK(BM_ActIncidence)->Args({1000, 1})->Args({5000, 1})->Args({5000, 4})->Unit(benchmark::kMicrosecond);

static void BM_SpanSumset(benchmark::State& state) {
  const SpanInstance inst = gen_span(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(span_iterated_sumset(inst, static_cast<unsigned>(state.range(1))));
}
BENCHMARK(BM_SpanSumset)->Args({256, 3})->Args({65536, 3})->Unit(benchmark::kMillisecond);

static void BM_DetectAddMul(benchmark::State& state) {
  const MultiPoly f = state.range(0) == 0 ? parse_poly("(x^3 + 2*x + y0^2 - y0*y1)^4 - 7", 3)
                                          : parse_poly("(x^2 + x)^3*(y0 + y1^2)^3 + 2*(x^2 + x)*(y0 + y1^2)", 3);
  for (auto _ : state) benchmark::DoNotOptimize(detect_addmul(f));
}
BENCHMARK(BM_DetectAddMul)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_DecomposeUni(benchmark::State& state) {
  const UniPoly f = compose(parse_uni("x^6 - 3*x^2 + 1"), parse_uni("2*x^5 + x^3 - x + 4"));
  for (auto _ : state) benchmark::DoNotOptimize(decompose_uni(f));
}
BENCHMARK(BM_DecomposeUni)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
