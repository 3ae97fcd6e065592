#pragma once

#include <complex>
#include <vector>

namespace sns {

// Cached-plan FFTW wrapper for 2D complex transforms on m x m lattices.
//
// Conventions: physical values live on the uniform grid x_j = 2*pi*j/m of the
// 2*pi-periodic torus with unit-mass measure; spectral coefficients satisfy
// phi(x) = sum_k phi_hat(k) e^{i k.x}.  backward() evaluates that sum
// (unnormalised inverse DFT), forward() applies the 1/m^2 analysis factor.
// Plans use FFTW_ESTIMATE so planning is deterministic run to run.
namespace fft {

void forward(int m, std::complex<double>* data);   // physical -> spectral
void backward(int m, std::complex<double>* data);  // spectral -> physical

// Smallest 2,3,5-smooth even integer >= target (friendly FFT sizes).
int good_size(int target);

}  // namespace fft

}  // namespace sns
