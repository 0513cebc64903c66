#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace imclean::fft {

namespace {

// FFTW plan creation is not thread-safe; new-array execution is. Plans are
// created once per (size, direction) against an aligned probe buffer and run
// via fftw_execute_dft on caller buffers with matching alignment.
std::mutex g_plan_mutex;

fftw_plan plan_for(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  const auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  fftw_complex* probe = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
  fftw_plan plan = fftw_plan_dft_2d(n, n, probe, probe, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(probe);
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

void transform_2d(std::complex<double>* data, int n, int sign) {
  fftw_plan plan = plan_for(n, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

std::vector<std::complex<double>> forward_2d(const double* map, int n) {
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n) * n);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = map[i];
  transform_2d(buf.data(), n, FFTW_FORWARD);
  return buf;
}

}  // namespace imclean::fft
