#include "agmmn/sampling.hpp"

#include "agmmn/distributions.hpp"
#include "agmmn/random.hpp"

#include <stdexcept>

namespace agmmn {

Matrix normal_prior_from_uniform(const Matrix& v) {
    Matrix z(v.rows(), v.cols());
    for (Index j = 0; j < v.cols(); ++j) {
        for (Index i = 0; i < v.rows(); ++i) {
            const double u = v(i, j) == 0.0 ? 0x1.0p-53 : v(i, j);
            if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("prior transform: point outside [0,1)");
            z(i, j) = normal_quantile(u);
        }
    }
    return z;
}

Matrix qrs_from_model(const MlpModel& model, SobolStream& stream, Index n_gen) {
    if (stream.dim() != model.architecture().input_dim) {
        throw DimensionError("Sobol' stream dimension differs from the model prior dimension");
    }
    const Matrix v = sobol_points(stream, n_gen);
    return pseudo_obs(predict(model, normal_prior_from_uniform(v)));
}

Matrix prs_from_model(const MlpModel& model, Index n_gen, std::uint64_t seed, std::uint64_t replicate) {
    if (n_gen < 1) throw std::invalid_argument("prs_from_model: n_gen must be >= 1");
    Rng rng = make_rng(seed, "model-prs", replicate);
    const Matrix z = standard_normal_matrix(n_gen, model.architecture().input_dim, rng);
    return pseudo_obs(predict(model, z));
}

Matrix qrs_from_copula(const ResolvedCopula& copula, SobolStream& stream, Index n_gen) {
    if (stream.dim() != copula.dim) throw DimensionError("Sobol' stream dimension differs from the copula dimension");
    return rosenblatt_inverse(copula, sobol_points(stream, n_gen));
}

}  // namespace agmmn
