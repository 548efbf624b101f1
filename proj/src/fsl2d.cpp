#include "fsl/fsl2d.hpp"

#include <json.hpp>

#include <cmath>
#include <string>

namespace fsl {

TriangularIndex::TriangularIndex(int L) : l_(L) {
    if (L < 0) throw ConfigError("triangular index degree must be nonnegative");
}

std::pair<int, int> TriangularIndex::pq(Index row) const {
    if (row < 0 || row >= size()) throw ConfigError("triangular row out of range");
    int d = 0;
    while (static_cast<Index>(d + 1) * (d + 2) / 2 <= row) ++d;
    const int p = static_cast<int>(row - static_cast<Index>(d) * (d + 1) / 2);
    return {p, d - p};
}

MonomialMatrix2D::MonomialMatrix2D(const Points2D& points, int L) : index_(L) {
    if (points.rows() == 0) throw ConfigError("monomial matrix needs at least one point");
    values_.resize(index_.size(), points.rows());
    const auto z1 = points.col(0).transpose();
    const auto z2 = points.col(1).transpose();
    values_.row(0).setOnes();
    for (int d = 1; d <= L; ++d) {
        // (0, d) from (0, d-1) along coordinate 2; every p >= 1 from (p-1, q).
        values_.row(TriangularIndex::index(0, d)) =
            values_.row(TriangularIndex::index(0, d - 1)).cwiseProduct(z2);
        for (int p = 1; p <= d; ++p) {
            values_.row(TriangularIndex::index(p, d - p)) =
                values_.row(TriangularIndex::index(p - 1, d - p)).cwiseProduct(z1);
        }
    }
}

Vector reflector_coefficients(double kappa, int L) {
    const Matrix tri = trinomial_triangle(L);
    const TriangularIndex idx(L);
    Vector b(idx.size());
    double power = 1.0;  // (-kappa)^d
    for (int d = 0; d <= L; ++d) {
        for (int p = 0; p <= d; ++p) b[TriangularIndex::index(p, d - p)] = power * tri(p, d - p);
        power *= -kappa;
    }
    return b;
}

FslKernel2D::FslKernel2D(const Points2D& xs, const Points2D& ys, double kappa, int L)
    : ax_(xs, L), ay_(ys, L), bpq_(reflector_coefficients(kappa, L)), kappa_(kappa) {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw ConfigError("kappa must lie in (0, 1]");
    if (L < 1) throw ConfigError("L must be positive");
    scratch_.resize(bpq_.size());
}

void FslKernel2D::contract(const Matrix& from, const Matrix& to, const Vector& xi,
                           Vector& out) const {
    scratch_.noalias() = from * xi;
    scratch_.array() *= bpq_.array();
    out.resize(to.cols());
    out.noalias() = to.transpose() * scratch_;
    count(static_cast<std::uint64_t>(from.rows()) *
              static_cast<std::uint64_t>(from.cols() + to.cols()) +
          static_cast<std::uint64_t>(from.rows()));
}

void FslKernel2D::apply(const Vector& xi, Vector& out) const {
    check_apply_size(xi);
    contract(ay_.values(), ax_.values(), xi, out);
}

void FslKernel2D::apply_transpose(const Vector& xi, Vector& out) const {
    check_transpose_size(xi);
    contract(ax_.values(), ay_.values(), xi, out);
}

std::unique_ptr<KernelApplicator> FslKernel2D::clone() const {
    return std::make_unique<FslKernel2D>(*this);
}

FslKernel2D build_fsl2d(double kappa, const Points2D& xs, const Points2D& ys, int L) {
    if (L < 1) throw ConfigError("L must be positive");
    if (L > kMaxMultinomialOrder) throw ConfigError("L exceeds the multinomial ceiling");
    validate_support(ReflectorRefractorCost(kappa), xs, ys);
    return FslKernel2D(xs, ys, kappa, L);
}

Points2D grid_points(int n, double h) {
    if (n < 1) throw ConfigError("grid side must be positive");
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("grid length must be positive");
    Points2D pts(static_cast<Index>(n) * n, 2);
    Index r = 0;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j, ++r) {
            pts(r, 0) = i * h;
            pts(r, 1) = j * h;
        }
    }
    return pts;
}

Points2D parse_points_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.is_object()) return grid_points(j.at("n").get<int>(), j.at("h").get<double>());
        if (!j.is_array()) throw ConfigError("points JSON must be a grid object or an array");
        Points2D pts(static_cast<Index>(j.size()), 2);
        for (std::size_t r = 0; r < j.size(); ++r) {
            if (!j[r].is_array() || j[r].size() != 2) {
                throw ConfigError("each point must be a coordinate pair");
            }
            pts(static_cast<Index>(r), 0) = j[r][0].get<double>();
            pts(static_cast<Index>(r), 1) = j[r][1].get<double>();
        }
        return pts;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("points JSON: ") + e.what());
    }
}

}  // namespace fsl
