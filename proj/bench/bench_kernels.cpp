#include <benchmark/benchmark.h>

#include <random>

#include "convexdl/convexity.hpp"
#include "convexdl/group_models.hpp"
#include "convexdl/ha_space.hpp"

using namespace convexdl;

namespace {

// A3 with |A| * log2 q^m close to the enumeration budget.
HASetup big_setup() {
  const auto rs = build_root_system("A3");
  std::mt19937_64 rng(4);
  HASetupInput best;
  for (int t = 0; t < 64; ++t) {
    auto in = random_ha_input(rs, identity_aut(3), FieldSpec{2, 1, {}}, rng, 18);
    if (in.A.size() > best.A.size()) best = in;
  }
  return HASetup(best);
}

const HASetup& setup() {
  static const HASetup s = big_setup();
  return s;
}

const TwistedClass& d4_class() {
  static const TwistedClass c = [] {
    const auto rs = build_root_system("D4");
    TwistedClass best;
    for (auto& cls : enumerate_twisted_classes(rs, identity_aut(4)))
      if (cls.elliptic && cls.members.size() > best.members.size()) best = cls;
    return best;
  }();
  return c;
}

void BM_EnumerateV(benchmark::State& st) {
  const auto& S = setup();
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? enumerate_V(S, S.zero(), 18) : enumerate_V_serial(S, S.zero(), 18));
}

void BM_SteinbergBijectivity(benchmark::State& st) {
  const auto& S = setup();
  for (auto _ : st)
    benchmark::DoNotOptimize(st.range(0) ? steinberg_bijectivity(S, 18) : steinberg_bijectivity_serial(S, 18));
}

void BM_ClassConvexity(benchmark::State& st) {
  const auto& cls = d4_class();
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? class_convexity_flags(cls) : class_convexity_flags_serial(cls));
}

void BM_DLSets(benchmark::State& st) {
  ModelSpec spec;
  spec.n = 2;
  spec.q = 3;
  spec.r = 1;
  spec.twist.word = {1};
  static const GroupModel M = build_model(spec);
  static const HoweDatum h = howe_from_simple_subsets(M.x(), {{}, {0}}, {Rational(1), Rational(1)});
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? enumerate_dl_sets(M, &h) : enumerate_dl_sets_serial(M, &h));
}

void BM_CrossSection(benchmark::State& st) {
  const auto rs = build_root_system("A2");
  const auto x = TwistedElement::from_word(rs, {1, 2});
  const FieldSpec f{2, 3, {}};
  for (auto _ : st)
    benchmark::DoNotOptimize(st.range(0) ? cross_section_group_check(x, f, {}) : cross_section_group_check_serial(x, f, {}));
}

}  // namespace

// Argument 0 runs the serial reference, 1 the OpenMP kernel.
BENCHMARK(BM_EnumerateV)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SteinbergBijectivity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClassConvexity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DLSets)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossSection)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
