#pragma once

#include <cstddef>
#include <vector>

#include "textgat/numcore/dense.hpp"
#include "textgat/numcore/rng.hpp"

namespace textgat {

enum class Mode { train, eval };

// Inverted-dropout multipliers: 0 with probability `rate`, else 1/(1-rate).
// Empty when dropout is inactive (eval mode or rate 0), meaning "all ones".
std::vector<double> dropout_mask(std::size_t n, double rate, Rng& rng, Mode mode);

// In-place multiply by a mask from dropout_mask; no-op for an empty mask.
void apply_mask(std::vector<double>& values, const std::vector<double>& mask);
void apply_mask(DenseMatrix& values, const std::vector<double>& mask);

DenseMatrix dropout(const DenseMatrix& h, double rate, Rng& rng, Mode mode);

}  // namespace textgat
