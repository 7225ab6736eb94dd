#include <array>
#include <cmath>
#include <string>

#include "cofflow/flow.hpp"

namespace cofflow {
namespace {

using Matrix6 = std::array<std::array<double, 6>, 6>;

// Gauss-Jordan inverse with partial pivoting. The Gram matrix of the
// quadratic basis under a positive applicability is positive definite.
Matrix6 invert(Matrix6 m) {
    Matrix6 inv{};
    for (int i = 0; i < 6; ++i) inv[i][i] = 1.0;
    for (int col = 0; col < 6; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 6; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        if (m[pivot][col] == 0.0) throw InvalidArgument("singular polynomial basis Gram matrix");
        std::swap(m[col], m[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double d = m[col][col];
        for (int k = 0; k < 6; ++k) {
            m[col][k] /= d;
            inv[col][k] /= d;
        }
        for (int r = 0; r < 6; ++r) {
            if (r == col || m[r][col] == 0.0) continue;
            const double f = m[r][col];
            for (int k = 0; k < 6; ++k) {
                m[r][k] -= f * m[col][k];
                inv[r][k] -= f * inv[col][k];
            }
        }
    }
    return inv;
}

// Inverse Gram matrix of the basis {1, x, y, x^2, y^2, xy} weighted by the
// separable applicability w(x)w(y). Identical for every pixel because
// borders are handled by replication rather than by truncating the window.
Matrix6 inverse_gram(const std::vector<double>& w) {
    const int radius = static_cast<int>(w.size() / 2);
    Matrix6 gram{};
    for (int y = -radius; y <= radius; ++y) {
        for (int x = -radius; x <= radius; ++x) {
            const double weight = w[x + radius] * w[y + radius];
            const std::array<double, 6> basis{1.0,
                                              static_cast<double>(x),
                                              static_cast<double>(y),
                                              static_cast<double>(x * x),
                                              static_cast<double>(y * y),
                                              static_cast<double>(x * y)};
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) gram[i][j] += weight * basis[i] * basis[j];
            }
        }
    }
    return invert(gram);
}

}  // namespace

std::vector<double> gaussian_kernel(double sigma, int radius) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("gaussian_kernel: sigma must be positive, got " + std::to_string(sigma));
    }
    if (radius < 1) throw InvalidArgument("gaussian_kernel: radius must be >= 1");
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (auto& v : k) v /= sum;
    return k;
}

PolyExpansion poly_expand(const GrayImage& image, int poly_n, double poly_sigma) {
    return poly_expand(image.pixels(), poly_n, poly_sigma);
}

PolyExpansion poly_expand(const Grid<double>& image, int poly_n, double poly_sigma) {
    if (poly_n < 3 || poly_n % 2 == 0) {
        throw InvalidArgument("poly_n must be odd and >= 3, got " + std::to_string(poly_n));
    }
    if (image.width() < poly_n || image.height() < poly_n) {
        throw DimensionError("image " + std::to_string(image.width()) + "x" +
                             std::to_string(image.height()) + " smaller than the " +
                             std::to_string(poly_n) + "x" + std::to_string(poly_n) +
                             " expansion neighborhood");
    }
    const int radius = poly_n / 2;
    const auto w = gaussian_kernel(poly_sigma, radius);
    const Matrix6 ginv = inverse_gram(w);
    const Size size = image.size();

    // Vertical pass: weighted moments of order 0, 1, 2 in y.
    Grid<double> v0(size), v1(size), v2(size);
    for (int y = 0; y < size.height; ++y) {
        for (int x = 0; x < size.width; ++x) {
            double s0 = 0.0, s1 = 0.0, s2 = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const double f = w[k + radius] * image.clamped(x, y + k);
                s0 += f;
                s1 += k * f;
                s2 += k * k * f;
            }
            v0(x, y) = s0;
            v1(x, y) = s1;
            v2(x, y) = s2;
        }
    }

    PolyExpansion out{Grid<double>(size), Grid<double>(size), Grid<double>(size),
                      Grid<double>(size), Grid<double>(size), Grid<double>(size)};
    for (int y = 0; y < size.height; ++y) {
        for (int x = 0; x < size.width; ++x) {
            // projections onto 1, x, y, x^2, y^2, xy
            std::array<double, 6> m{};
            for (int j = -radius; j <= radius; ++j) {
                const double wj = w[j + radius];
                const double a0 = wj * v0.clamped(x + j, y);
                const double a1 = wj * v1.clamped(x + j, y);
                m[0] += a0;
                m[1] += j * a0;
                m[2] += a1;
                m[3] += j * j * a0;
                m[4] += wj * v2.clamped(x + j, y);
                m[5] += j * a1;
            }
            std::array<double, 6> r{};
            for (int i = 0; i < 6; ++i) {
                for (int k = 0; k < 6; ++k) r[i] += ginv[i][k] * m[k];
            }
            out.c(x, y) = r[0];
            out.b1(x, y) = r[1];
            out.b2(x, y) = r[2];
            out.a11(x, y) = r[3];
            out.a22(x, y) = r[4];
            out.a12(x, y) = 0.5 * r[5];
        }
    }
    return out;
}

}  // namespace cofflow
