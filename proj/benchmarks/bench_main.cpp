#include <benchmark/benchmark.h>

#include "semflow/abstraction.hpp"
#include "semflow/cfg.hpp"
#include "semflow/graph_pattern.hpp"
#include "semflow/languages.hpp"
#include "semflow/match.hpp"

using namespace semflow;

namespace {

TermPtr deep_add(int n) {
  TermPtr t = imp_int(1);
  for (int i = 0; i < n; ++i) t = imp_add(t, imp_int(1));
  return t;
}

void bm_match(benchmark::State& st) {
  auto p = parse_term("(+ ?a:nonval ?b:val)");
  auto s = imp_add(deep_add(16), imp_int(2));
  for (auto _ : st) benchmark::DoNotOptimize(match(p, s));
}
BENCHMARK(bm_match);

void bm_unify(benchmark::State& st) {
  auto a = parse_term("(+ ?a:all (+ ?b:all 1))");
  auto b = parse_term("(+ (+ 2 3) ?c:all)");
  for (auto _ : st) benchmark::DoNotOptimize(unify(a, b));
}
BENCHMARK(bm_unify);

void bm_sos_run(benchmark::State& st) {
  Language imp = imp_language();
  Configuration c{deep_add(24), empty_state()};
  for (auto _ : st) benchmark::DoNotOptimize(sos_run(imp, c, 64).states.size());
}
BENCHMARK(bm_sos_run);

void bm_explore(benchmark::State& st) {
  Language imp = imp_language();
  auto pam = sos_to_pam(imp);
  auto am = fuse(imp, pam_to_unfused_am(imp, pam));
  Abstraction abs = value_irrelevance(imp);
  ProgramSource src{"x := 0; while x < 10 do x := x + 1 od; y := x", "imp"};
  AmState start = initial_state_closed(imp, parse_program(src));
  for (auto _ : st)
    benchmark::DoNotOptimize(explore_graph(imp, am, abs, start, 10000).nodes.size());
}
BENCHMARK(bm_explore);

void bm_while_pattern(benchmark::State& st) {
  Language imp = imp_language();
  auto pam = sos_to_pam(imp);
  auto am = fuse(imp, pam_to_unfused_am(imp, pam));
  Abstraction abs = value_irrelevance(imp);
  for (auto _ : st)
    benchmark::DoNotOptimize(gen_graph_pattern(imp, am, abs, "while").nodes.size());
}
BENCHMARK(bm_while_pattern);

}  // namespace

BENCHMARK_MAIN();
