#pragma once
// Deterministic FFTW3 wrapper.
//
// Plans are created with FFTW_ESTIMATE only: measured planning picks
// different algorithms run-to-run, which changes floating-point summation
// order and breaks byte-identical reproducibility.  Everything here is
// single-threaded and unnormalized (callers apply their own measure
// constants, e.g. Δx for forward transforms).

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace speclab {

// In-place unnormalized DFT.  sign = FFTW_FORWARD (−1, kernel e^{−2πi jk/n})
// or FFTW_BACKWARD (+1).
inline void dft_1d(std::vector<std::complex<double>>& data, int sign) {
    if (data.empty()) throw std::invalid_argument("dft_1d: empty input");
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(data.size()), reinterpret_cast<fftw_complex*>(data.data()),
        reinterpret_cast<fftw_complex*>(data.data()), sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

// In-place unnormalized 2-D DFT on row-major data (rows × cols).
inline void dft_2d(std::vector<std::complex<double>>& data, std::size_t rows,
                   std::size_t cols, int sign) {
    if (data.size() != rows * cols)
        throw std::invalid_argument("dft_2d: size mismatch");
    fftw_plan plan = fftw_plan_dft_2d(
        static_cast<int>(rows), static_cast<int>(cols),
        reinterpret_cast<fftw_complex*>(data.data()),
        reinterpret_cast<fftw_complex*>(data.data()), sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

}  // namespace speclab
