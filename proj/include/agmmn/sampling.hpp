#pragma once

#include <cstdint>

#include "agmmn/common.hpp"
#include "agmmn/copula.hpp"
#include "agmmn/nn.hpp"
#include "agmmn/sobol.hpp"

namespace agmmn {

/// Coordinatewise standard-normal quantile of points in [0,1); exact zeros
/// are nudged to 2^-53 first.
Matrix normal_prior_from_uniform(const Matrix& v);

/// Quasi-random sample from a trained generator: Sobol' points from the
/// stream cursor, mapped through the normal quantile and the model, returned
/// as pseudo-observations.
Matrix qrs_from_model(const MlpModel& model, SobolStream& stream, Index n_gen);

/// Pseudo-random counterpart with iid normal priors from the "model-prs"
/// substream of `seed`.
Matrix prs_from_model(const MlpModel& model, Index n_gen, std::uint64_t seed, std::uint64_t replicate = 0);

/// Copula sample via the inverse Rosenblatt transform of Sobol' points.
Matrix qrs_from_copula(const ResolvedCopula& copula, SobolStream& stream, Index n_gen);

}  // namespace agmmn
