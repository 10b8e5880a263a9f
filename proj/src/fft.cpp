#include "hetsys/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace hetsys {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;
std::map<std::array<int, 6>, PlanPair>& plan_cache() {
  static auto* cache = new std::map<std::array<int, 6>, PlanPair>();
  return *cache;
}

PlanPair& plans_for(const std::array<int, 6>& dims) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(dims);
  if (it != cache.end()) return it->second;

  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  fftw_complex* buf = fftw_alloc_complex(total);
  PlanPair pp;
  // FFTW_UNALIGNED so the plans can execute on arbitrary caller buffers.
  pp.fwd = fftw_plan_dft(6, dims.data(), buf, buf, FFTW_FORWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  pp.bwd = fftw_plan_dft(6, dims.data(), buf, buf, FFTW_BACKWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  auto [pos, ok] = cache.emplace(dims, pp);
  return pos->second;
}

}  // namespace

void fft6(const GridSpec& grid, const cplx* in, cplx* out, int sign) {
  PlanPair& pp = plans_for(grid.n);
  auto* fin = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in));
  auto* fout = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(sign < 0 ? pp.fwd : pp.bwd, fin, fout);
}

}  // namespace hetsys
