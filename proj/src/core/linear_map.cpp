#include "linear_map.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"

namespace lrr {

namespace {
constexpr std::uint64_t kTagPayload = 0x70617961ULL;  // payload stream
constexpr std::uint64_t kTagMask = 0x6d61736bULL;     // mask sampling stream
constexpr std::uint64_t kTagPower = 0x70777230ULL;    // power-iteration start

void check_shape(Index m, Index n, Index p) {
    if (m < 1 || n < 1) throw std::invalid_argument("LinearMap: m, n must be >= 1");
    if (p < 1) throw std::invalid_argument("LinearMap: p must be >= 1");
}
} // namespace

LinearMap LinearMap::gaussian(Index m, Index n, Index p, std::uint64_t seed) {
    check_shape(m, n, p);
    LinearMap map(MapKind::DenseGaussian, m, n, p, seed);
    GaussianStream stream(mix_seed(seed, kTagPayload));
    map.a_ = gaussian_matrix(p, m * n, stream, 1.0 / std::sqrt(static_cast<double>(p)));
    return map;
}

LinearMap LinearMap::identity(Index m, Index n) {
    check_shape(m, n, 1);
    return LinearMap(MapKind::Identity, m, n, m * n, 0);
}

LinearMap LinearMap::entry_mask(Index m, Index n, Index p, std::uint64_t seed) {
    check_shape(m, n, p);
    if (p > m * n) throw std::invalid_argument("LinearMap: mask size exceeds m*n");
    LinearMap map(MapKind::EntryMask, m, n, p, seed);
    // Partial Fisher-Yates over the linear indices gives p distinct
    // positions; sorting makes the measurement order canonical.
    const Index total = m * n;
    std::vector<Index> pool(static_cast<std::size_t>(total));
    for (Index i = 0; i < total; ++i) pool[static_cast<std::size_t>(i)] = i;
    GaussianStream stream(mix_seed(seed, kTagMask));
    for (Index i = 0; i < p; ++i) {
        const Index j = i + static_cast<Index>(stream.below(static_cast<std::uint64_t>(total - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    map.mask_.assign(pool.begin(), pool.begin() + p);
    std::sort(map.mask_.begin(), map.mask_.end());
    return map;
}

LinearMap LinearMap::dense(Index m, Index n, const Matrix& a) {
    check_shape(m, n, a.rows());
    if (a.cols() != m * n) {
        throw std::invalid_argument("LinearMap: payload must have m*n columns");
    }
    require_finite(a, "LinearMap payload");
    LinearMap map(MapKind::DenseExplicit, m, n, a.rows(), 0);
    map.a_ = a;
    return map;
}

Vector LinearMap::apply(const Matrix& x) const {
    if (x.rows() != m_ || x.cols() != n_) {
        throw std::invalid_argument("LinearMap::apply: shape mismatch");
    }
    switch (kind_) {
        case MapKind::Identity:
            return vec(x);
        case MapKind::EntryMask: {
            Vector y(p_);
            const double* flat = x.data();  // column-major, matches vec()
            for (Index t = 0; t < p_; ++t) y[t] = flat[mask_[static_cast<std::size_t>(t)]];
            return y;
        }
        case MapKind::DenseGaussian:
        case MapKind::DenseExplicit:
            return a_ * Eigen::Map<const Vector>(x.data(), x.size());
    }
    throw std::logic_error("LinearMap::apply: unknown kind");
}

Matrix LinearMap::adjoint(const Vector& y) const {
    if (y.size() != p_) {
        throw std::invalid_argument("LinearMap::adjoint: length mismatch");
    }
    switch (kind_) {
        case MapKind::Identity:
            return unvec(y, m_, n_);
        case MapKind::EntryMask: {
            Matrix x = Matrix::Zero(m_, n_);
            double* flat = x.data();
            for (Index t = 0; t < p_; ++t) flat[mask_[static_cast<std::size_t>(t)]] = y[t];
            return x;
        }
        case MapKind::DenseGaussian:
        case MapKind::DenseExplicit: {
            Vector z = a_.transpose() * y;
            return unvec(z, m_, n_);
        }
    }
    throw std::logic_error("LinearMap::adjoint: unknown kind");
}

double LinearMap::spectral_upper_bound(double rel_tol, int max_iters) const {
    if (kind_ == MapKind::Identity || kind_ == MapKind::EntryMask) {
        // A^* A is the identity (resp. a coordinate projection): the top
        // eigenvalue is exactly 1.
        return 1.0;
    }
    const Index dim = m_ * n_;
    GaussianStream stream(mix_seed(seed_, kTagPower));
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = stream.normal();
    double vnorm = v.norm();
    if (vnorm == 0.0) v[0] = vnorm = 1.0;
    v /= vnorm;

    double lambda = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Vector w = a_.transpose() * (a_ * v);
        lambda = v.dot(w);
        if (lambda <= 0.0) {
            // Zero (or numerically null) operator: lambda_max is 0.
            return 0.0;
        }
        const double resid = (w - lambda * v).norm();
        v = w / w.norm();
        if (resid <= rel_tol * lambda) {
            return lambda;
        }
    }
    throw NumericalError("spectral_upper_bound: power iteration cap exceeded");
}

double LinearMap::lambda_min_lower_bound() const {
    if (kind_ == MapKind::Identity) return 1.0;
    if (kind_ == MapKind::EntryMask && p_ == m_ * n_) return 1.0;
    return 0.0;
}

double delta_upper_from_bounds(double lambda_max, double lambda_min_lb) {
    return std::max({lambda_max - 1.0, 1.0 - lambda_min_lb, 0.0});
}

std::string LinearMap::to_json() const {
    const char* kind = nullptr;
    switch (kind_) {
        case MapKind::DenseGaussian: kind = "dense-gaussian"; break;
        case MapKind::Identity: kind = "identity"; break;
        case MapKind::EntryMask: kind = "entry-mask"; break;
        case MapKind::DenseExplicit:
            throw std::invalid_argument("LinearMap: explicit payloads are not serializable");
    }
    nlohmann::json j{{"kind", kind}, {"m", m_}, {"n", n_}, {"p", p_}, {"seed", seed_}};
    return j.dump(2);
}

LinearMap LinearMap::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("operator JSON: ") + e.what());
    }
    try {
        const std::string kind = j.at("kind").get<std::string>();
        const Index m = j.at("m").get<Index>();
        const Index n = j.at("n").get<Index>();
        const Index p = j.at("p").get<Index>();
        const std::uint64_t seed = j.at("seed").get<std::uint64_t>();
        if (kind == "dense-gaussian") return gaussian(m, n, p, seed);
        if (kind == "identity") {
            if (p != m * n) throw IoError("operator JSON: identity requires p = m*n");
            return identity(m, n);
        }
        if (kind == "entry-mask") return entry_mask(m, n, p, seed);
        throw IoError("operator JSON: unknown kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("operator JSON: ") + e.what());
    }
}

} // namespace lrr
