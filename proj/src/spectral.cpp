#include "spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "qkrdet/error.hpp"

namespace qkr::spectral {

struct Transform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  Plans() = default;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const Transform::Plans> plans_for(std::size_t n) {
  static std::map<std::size_t, std::shared_ptr<const Transform::Plans>> cache;
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  std::vector<cplx> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  auto plans = std::make_shared<Transform::Plans>();
  // ESTIMATE keeps plan selection deterministic; UNALIGNED lets us execute on
  // any std::vector buffer.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int len = static_cast<int>(n);
  plans->forward = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, flags);
  plans->inverse = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, flags);
  if (!plans->forward || !plans->inverse) {
    throw Error(ErrorCode::InvalidArgument, "could not plan transform");
  }
  cache.emplace(n, plans);
  return plans;
}

}  // namespace

Transform::Transform(std::size_t n) : n_(n), plans_(plans_for(n)) {}

void Transform::forward(std::span<cplx> data) const {
  if (data.size() != n_) throw Error(ErrorCode::InvalidArgument, "transform size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->forward, buf, buf);
}

void Transform::inverse(std::span<cplx> data) const {
  if (data.size() != n_) throw Error(ErrorCode::InvalidArgument, "transform size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->inverse, buf, buf);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& c : data) c *= scale;
}

}  // namespace qkr::spectral
