#include <benchmark/benchmark.h>

#include "sfm/degrade.hpp"
#include "sfm/random.hpp"
#include "sfm/sfm.hpp"
#include "sfm/spectra.hpp"
#include "sfm/transform.hpp"

namespace {

sfm::Image make_image(int h, int w, int channels = 1) {
  sfm::Image img(h, w, channels, sfm::NominalRange::byte);
  sfm::rng::engine g(42);
  for (auto& v : img.data) v = static_cast<double>(g() % 256);
  return img;
}

void BM_DctForward(benchmark::State& state) {
  const sfm::Image img = make_image(static_cast<int>(state.range(0)),
                                    static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(sfm::dct2_forward(img));
  state.SetItemsProcessed(state.iterations() * img.data.size());
}
BENCHMARK(BM_DctForward)
    ->Args({64, 64})
    ->Args({128, 128})
    ->Args({256, 256})
    ->Args({512, 512})
    ->Args({257, 251})  // prime sides exercise the Bluestein path
    ->Args({480, 320})
    ->Unit(benchmark::kMicrosecond);

void BM_DctInverse(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const sfm::Spectrum spec = sfm::dct2_forward(make_image(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(sfm::dct2_inverse(spec));
  state.SetItemsProcessed(state.iterations() * spec.coeffs.size());
}
BENCHMARK(BM_DctInverse)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_DctForwardNaive(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const sfm::Image img = make_image(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(sfm::dct2_forward_naive(img));
  state.SetItemsProcessed(state.iterations() * img.data.size());
}
BENCHMARK(BM_DctForwardNaive)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_ConvolveGaussian(benchmark::State& state) {
  const sfm::Image img = make_image(256, 256);
  const sfm::BlurKernel k =
      sfm::gaussian_kernel(static_cast<double>(state.range(0)) / 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(sfm::convolve(img, k));
  state.SetItemsProcessed(state.iterations() * img.data.size());
}
BENCHMARK(BM_ConvolveGaussian)->Arg(21)->Arg(41)->Arg(74)->Unit(benchmark::kMicrosecond);

void BM_BicubicDownsample(benchmark::State& state) {
  const sfm::Image img = make_image(256, 256);
  const int factor = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sfm::downsample(img, factor, sfm::DownsampleKind::bicubic));
  state.SetItemsProcessed(state.iterations() * img.data.size());
}
BENCHMARK(BM_BicubicDownsample)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_ApplySfm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const sfm::Image img = make_image(n, n);
  sfm::rng::engine g(7);
  const sfm::MaskSpec spec = sfm::sample_central({n, n}, g);
  for (auto _ : state) benchmark::DoNotOptimize(sfm::apply_sfm(img, spec));
  state.SetItemsProcessed(state.iterations() * img.data.size());
}
BENCHMARK(BM_ApplySfm)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_RadialPsd(benchmark::State& state) {
  const sfm::Image img = make_image(256, 256);
  for (auto _ : state) benchmark::DoNotOptimize(sfm::radial_psd(img, 64));
  state.SetItemsProcessed(state.iterations() * img.data.size());
}
BENCHMARK(BM_RadialPsd)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
