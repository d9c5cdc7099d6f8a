#pragma once

#include "ncerg/algebra.hpp"
#include "ncerg/dynamics.hpp"
#include "ncerg/rng.hpp"

namespace ncerg {

/// Independent standard complex Gaussian entries (real and imaginary parts N(0, 1/2)).
Mat random_gaussian(int rows, int cols, CounterRng& rng);
/// Haar-distributed unitary via QR with phase correction.
Mat random_unitary(int d, CounterRng& rng);

Operator random_operator(const AlgebraPtr& algebra, CounterRng& rng);
Operator random_hermitian(const AlgebraPtr& algebra, CounterRng& rng);
/// g* g / d for a Gaussian g in every block.
Operator random_positive(const AlgebraPtr& algebra, CounterRng& rng);
/// Diagonal positive operator with entries uniform in [0, 1).
Operator random_diagonal_positive(const AlgebraPtr& algebra, CounterRng& rng);

/// Margin keeping random channels strictly inside DS+.
inline constexpr double kRandomChannelMargin = 1e-3;

/// `terms_per_pair` Gaussian Kraus operators for every (input, output) block
/// pair, jointly rescaled so that max(lambda_max T(1), lambda_max T^dagger(1)) = 1 - margin.
Channel random_kraus_channel(const AlgebraPtr& algebra, CounterRng& rng, int terms_per_pair = 0,
                             double margin = kRandomChannelMargin);

/// Random entrywise-positive transition matrix on a diagonal algebra, rescaled
/// so the larger of the max row sum and the max weighted column ratio is 1 - margin.
Channel random_substochastic(const AlgebraPtr& algebra, CounterRng& rng, double margin = kRandomChannelMargin);

/// sum_k p_k u_k* x u_k: unital and trace preserving.
Channel random_mixed_unitary(const AlgebraPtr& algebra, CounterRng& rng, int terms = 3);

}  // namespace ncerg
