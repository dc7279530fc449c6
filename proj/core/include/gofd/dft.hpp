#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gofd {

enum class DftDirection { Forward, Inverse };

/// Multi-dimensional DFT of a row-major tensor (last axis fastest).
///
/// Forward is unnormalized with kernel exp(-2 pi i j k / n); Inverse uses
/// exp(+2 pi i j k / n) and divides by the total size. Any positive extent
/// is accepted.
std::vector<std::complex<double>> dft(std::span<const std::complex<double>> values,
                                      std::span<const std::size_t> shape, DftDirection direction);

/// Smallest integer >= n whose prime factors are all in {2, 3, 5, 7}.
std::size_t next_fast_size(std::size_t n);

}  // namespace gofd
