#include "spsim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace spsim::fft {
namespace {

// The FFTW planner is not thread-safe; plan creation is serialized and plans
// are cached per (rank, shape, sign). Plans are created with FFTW_ESTIMATE so
// planning is deterministic (FFTW_MEASURE picks algorithms by runtime timing,
// which can change summation order between runs and break bit-identical
// output), and FFTW_UNALIGNED so the cached plan may execute on any buffer.
std::mutex planner_mutex;

fftw_plan plan_for(int rank, const int* shape, int sign, fftw_complex* buf) {
  using Key = std::tuple<int, int, int, int>;
  static std::map<Key, fftw_plan> cache;
  Key key{rank, shape[0], rank > 1 ? shape[1] : 1, sign};
  std::lock_guard<std::mutex> lock(planner_mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  fftw_plan plan = fftw_plan_dft(rank, shape, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw std::runtime_error("FFTW plan creation failed");
  cache.emplace(key, plan);
  return plan;
}

void execute(std::complex<double>* data, int rank, const int* shape, int sign) {
  if (rank < 1 || rank > 2) throw std::invalid_argument("fft: rank must be 1 or 2");
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan_for(rank, shape, sign, buf), buf, buf);
}

}  // namespace

void forward(std::complex<double>* data, int rank, const int* shape) {
  execute(data, rank, shape, FFTW_FORWARD);
}

void backward(std::complex<double>* data, int rank, const int* shape) {
  execute(data, rank, shape, FFTW_BACKWARD);
}

void backward_normalized(std::complex<double>* data, int rank, const int* shape) {
  execute(data, rank, shape, FFTW_BACKWARD);
  std::size_t total = 1;
  for (int d = 0; d < rank; ++d) total *= static_cast<std::size_t>(shape[d]);
  const double scale = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
}

}  // namespace spsim::fft
