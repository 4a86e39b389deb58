#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace spsim::fft {

// In-place complex-to-complex transforms, FFTW sign convention
// (forward kernel e^{-ikx}), unnormalized. shape is row-major; rank 1 or 2.
void forward(std::complex<double>* data, int rank, const int* shape);
void backward(std::complex<double>* data, int rank, const int* shape);

// Backward transform divided by the total number of points, so that
// backward_normalized(forward(u)) == u up to roundoff.
void backward_normalized(std::complex<double>* data, int rank, const int* shape);

inline void forward(std::complex<double>* data, const std::array<int, 2>& shape, int rank) {
  forward(data, rank, shape.data());
}

}  // namespace spsim::fft
