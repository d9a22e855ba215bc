#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "qkrdet/qstate.hpp"

namespace qkr::spectral {

/// Forward/inverse DFT pair on complex vectors of a fixed length. The forward
/// transform is unscaled; the inverse divides by N, so a round trip is the
/// identity. Plans are shared process-wide and safe to execute concurrently.
class Transform {
 public:
  explicit Transform(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

  struct Plans;

 private:
  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace qkr::spectral
