#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "hcfbeam/errors.hpp"

namespace hcfbeam {

using Vec2 = std::array<double, 2>;
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 zeros4() {
    return Mat4{{{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}};
}

inline Mat4 identity4() {
    Mat4 m = zeros4();
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
    return m;
}

inline Vec4 matvec(const Mat4& m, const Vec4& x) {
    Vec4 y{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) y[i] += m[i][j] * x[j];
    return y;
}

inline Mat4 matmul(const Mat4& a, const Mat4& b) {
    Mat4 c = zeros4();
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline Mat4 axpy4(double alpha, const Mat4& x, const Mat4& y) {
    Mat4 c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c[i][j] = alpha * x[i][j] + y[i][j];
    return c;
}

/// Gauss-Jordan inverse with partial pivoting. Throws on a singular block.
inline Mat4 inverse4(const Mat4& m) {
    Mat4 a = m;
    Mat4 inv = identity4();
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) throw Error("inverse4: singular matrix");
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(inv[piv], inv[col]);
        }
        const double d = 1.0 / a[col][col];
        for (int j = 0; j < 4; ++j) {
            a[col][j] *= d;
            inv[col][j] *= d;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (int j = 0; j < 4; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

}  // namespace hcfbeam
