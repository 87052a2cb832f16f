#pragma once

#include <span>
#include <vector>

#include "lpisim/types.hpp"

namespace lpisim::fft {

/// Unnormalized discrete Fourier transform for any length n >= 1:
///   forward:  out[k] = sum_n in[n] * exp(-j 2 pi k n / N)
///   inverse:  out[k] = sum_n in[n] * exp(+j 2 pi k n / N)   (no 1/N)
///
/// Iterative radix-2 for powers of two, Bluestein's chirp-z embedding
/// otherwise.  The implementation is deliberately plain — fixed loop order,
/// precomputed twiddles, no runtime algorithm selection — so identical inputs
/// produce identical bits on every run, which the golden vectors rely on.
void transform(std::span<const cd> in, std::span<cd> out, bool inverse);

void transform_inplace(std::span<cd> data, bool inverse);

/// Unitary pair used throughout the signal chain (1/sqrt(N) both ways).
void unitary_forward(std::span<const cd> in, std::span<cd> out);
void unitary_inverse(std::span<const cd> in, std::span<cd> out);

}  // namespace lpisim::fft
