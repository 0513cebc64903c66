#include <benchmark/benchmark.h>

#include "imclean/clean.hpp"
#include "imclean/contamination.hpp"
#include "imclean/evaluate.hpp"
#include "imclean/restore.hpp"
#include "imclean/rng.hpp"
#include "imclean/skysim.hpp"

#include <random>

namespace {

using namespace imclean;

skysim::SkyPatchSpec small_spec(Index n_pix, Index n_channels) {
  skysim::SkyPatchSpec spec;
  spec.ra_min_deg = 0.0;
  spec.ra_max_deg = 10.0;
  spec.dec_min_deg = 0.0;
  spec.dec_max_deg = 10.0;
  spec.n_pix = n_pix;
  spec.axis = FrequencyAxis{800.0e6, 20.0e6 / static_cast<double>(n_channels), n_channels};
  return spec;
}

Matrix random_matrix(Index rows, Index cols, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = dist(gen);
  return m;
}

void BM_GenerateCorrelatedField(benchmark::State& state) {
  const auto spec = small_spec(state.range(0), state.range(1));
  const auto model = skysim::default_foregrounds()[0];
  for (auto _ : state) {
    auto cube = skysim::generate_correlated_field(spec, model, 42, 1);
    benchmark::DoNotOptimize(cube.data.data());
  }
}
BENCHMARK(BM_GenerateCorrelatedField)->Args({64, 32})->Args({128, 54});

void BM_RemoveSvdModes(benchmark::State& state) {
  const Matrix data = random_matrix(state.range(0), state.range(1), 7);
  for (auto _ : state) {
    auto result = clean::remove_svd_modes(data, 4);
    benchmark::DoNotOptimize(result.residual.data());
  }
}
BENCHMARK(BM_RemoveSvdModes)->Args({1024, 216})->Args({128, 128});

void BM_FastIca(benchmark::State& state) {
  const Matrix data = random_matrix(state.range(0), state.range(1), 11);
  for (auto _ : state) {
    auto result = clean::remove_ica_components(data, 4, 1);
    benchmark::DoNotOptimize(result.residual.data());
  }
}
BENCHMARK(BM_FastIca)->Args({4096, 54})->Args({128, 128});

void BM_SpectralPolyRestore(benchmark::State& state) {
  const Matrix data = random_matrix(state.range(0), 216, 3);
  Mask mask = Mask::zeros(state.range(0), 216);
  rng::CounterRng r(5, 1);
  for (Index i = 0; i < mask.rows(); ++i)
    for (Index c = 0; c < mask.channels(); ++c)
      mask.flags(i, c) = r.uniform_at(static_cast<std::uint64_t>(i * 216 + c)) < 0.1;
  for (auto _ : state) {
    auto out = restore::spectral_poly_restore(data, mask, 2);
    benchmark::DoNotOptimize(out.restored.data());
  }
}
BENCHMARK(BM_SpectralPolyRestore)->Arg(2048);

void BM_AngularPowerSpectrum(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix map = random_matrix(n, n, 19);
  std::vector<double> edges;
  for (int i = 0; i <= 10; ++i) edges.push_back(40.0 + 60.0 * i);
  for (auto _ : state) {
    auto est = eval::angular_power_spectrum(map, 1.0e-3, edges);
    benchmark::DoNotOptimize(est.cl.data());
  }
}
BENCHMARK(BM_AngularPowerSpectrum)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
