#pragma once

#include <cstdint>

#include "otfs/types.hpp"

namespace otfs::fft {

enum class Direction { Forward, Inverse };

/// Unnormalized in-place DFT of `howmany` interleaved sequences of length
/// `n`. Element j of sequence b lives at data[b * dist + j * stride].
/// Forward uses e^{-j 2 pi k n / N}; Inverse uses the conjugate kernel.
///
/// Backed by FFTW; plans are cached per layout and shared across threads.
void transform_batch(Complex* data, int n, int howmany, int stride, int dist, Direction dir);

/// Complex multiplications charged to one length-n transform: the radix-2
/// count (n/2) log2 n, rounded up for other lengths.
std::uint64_t nominal_mults(int n);

}  // namespace otfs::fft
