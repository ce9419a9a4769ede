#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "nsg/errors.hpp"
#include "nsg/rational.hpp"

namespace nsg {

inline constexpr int kMaxDim = 4;
inline constexpr int kMinDim = 2;

// Plain double coordinates for inner loops (scans, golden-section search).
// Not part of the public vocabulary; Vector below is.
struct DVec {
    std::array<double, kMaxDim> v{0, 0, 0, 0};
    int n = 0;

    DVec() = default;
    DVec(double x, double y) : v{x, y, 0, 0}, n(2) {}
    DVec(double x, double y, double z) : v{x, y, z, 0}, n(3) {}
    DVec(double x, double y, double z, double w) : v{x, y, z, w}, n(4) {}

    double& operator[](int i) { return v[static_cast<size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<size_t>(i)]; }

    [[nodiscard]] DVec operator+(const DVec& o) const {
        DVec r = *this;
        for (int i = 0; i < n; ++i) r.v[static_cast<size_t>(i)] += o[i];
        return r;
    }
    [[nodiscard]] DVec operator-(const DVec& o) const {
        DVec r = *this;
        for (int i = 0; i < n; ++i) r.v[static_cast<size_t>(i)] -= o[i];
        return r;
    }
    [[nodiscard]] DVec operator-() const {
        DVec r = *this;
        for (int i = 0; i < n; ++i) r.v[static_cast<size_t>(i)] = -r.v[static_cast<size_t>(i)];
        return r;
    }
    [[nodiscard]] DVec scaled(double s) const {
        DVec r = *this;
        for (int i = 0; i < n; ++i) r.v[static_cast<size_t>(i)] *= s;
        return r;
    }
    [[nodiscard]] double dot(const DVec& o) const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += v[static_cast<size_t>(i)] * o[i];
        return s;
    }
    [[nodiscard]] double l2() const { return std::sqrt(dot(*this)); }
    [[nodiscard]] double linf() const {
        double m = 0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(v[static_cast<size_t>(i)]));
        return m;
    }
    [[nodiscard]] bool near_zero(double eps) const { return linf() <= eps; }
};

// Angle between directions, in radians; insensitive to the vectors' lengths.
[[nodiscard]] inline double angle_between(const DVec& a, const DVec& b) {
    const double na = a.l2(), nb = b.l2();
    if (na == 0 || nb == 0) return 0;
    double c = a.dot(b) / (na * nb);
    c = std::max(-1.0, std::min(1.0, c));
    return std::acos(c);
}

// A point of R^n, 2 <= n <= 4. Coordinates are exact rationals so the exact
// backend loses nothing; float paths convert on demand via approx().
class Vector {
public:
    Vector() = default;

    explicit Vector(std::vector<Rat> coords) {
        check_dim(static_cast<int>(coords.size()));
        n_ = static_cast<int>(coords.size());
        for (int i = 0; i < n_; ++i) c_[static_cast<size_t>(i)] = std::move(coords[static_cast<size_t>(i)]);
    }

    Vector(std::initializer_list<Rat> coords) : Vector(std::vector<Rat>(coords)) {}

    static Vector zeros(int n) {
        check_dim(n);
        Vector v;
        v.n_ = n;
        return v;
    }

    static Vector from(const DVec& d) {
        Vector v;
        v.n_ = d.n;
        check_dim(v.n_);
        for (int i = 0; i < d.n; ++i) v.c_[static_cast<size_t>(i)] = rat_of(d[i]);
        return v;
    }

    [[nodiscard]] int dim() const { return n_; }

    [[nodiscard]] const Rat& operator[](int i) const { return c_[static_cast<size_t>(i)]; }
    [[nodiscard]] Rat& operator[](int i) { return c_[static_cast<size_t>(i)]; }

    [[nodiscard]] bool is_zero() const {
        for (int i = 0; i < n_; ++i)
            if (c_[static_cast<size_t>(i)] != 0) return false;
        return true;
    }

    [[nodiscard]] DVec approx() const {
        DVec d;
        d.n = n_;
        for (int i = 0; i < n_; ++i) d[i] = to_double(c_[static_cast<size_t>(i)]);
        return d;
    }

    [[nodiscard]] Vector operator+(const Vector& o) const {
        Vector r = *this;
        for (int i = 0; i < n_; ++i) r.c_[static_cast<size_t>(i)] += o[i];
        return r;
    }
    [[nodiscard]] Vector operator-(const Vector& o) const {
        Vector r = *this;
        for (int i = 0; i < n_; ++i) r.c_[static_cast<size_t>(i)] -= o[i];
        return r;
    }
    [[nodiscard]] Vector operator-() const {
        Vector r = *this;
        for (int i = 0; i < n_; ++i) r.c_[static_cast<size_t>(i)] = -r.c_[static_cast<size_t>(i)];
        return r;
    }
    [[nodiscard]] Vector scaled(const Rat& s) const {
        Vector r = *this;
        for (int i = 0; i < n_; ++i) r.c_[static_cast<size_t>(i)] *= s;
        return r;
    }

    [[nodiscard]] bool operator==(const Vector& o) const {
        if (n_ != o.n_) return false;
        for (int i = 0; i < n_; ++i)
            if (c_[static_cast<size_t>(i)] != o[i]) return false;
        return true;
    }

    [[nodiscard]] std::string str() const {
        std::string s = "(";
        for (int i = 0; i < n_; ++i) {
            if (i) s += ", ";
            s += rat_str(c_[static_cast<size_t>(i)]);
        }
        return s + ")";
    }

private:
    static void check_dim(int n) {
        if (n < kMinDim || n > kMaxDim)
            throw DimensionMismatch("vector dimension " + std::to_string(n) +
                                    " outside supported range [2,4]");
    }

    std::array<Rat, kMaxDim> c_{};
    int n_ = 0;
};

// A linear functional f(x) = sum coeffs_i * x_i. Same storage discipline as
// Vector; kept as a distinct type because functionals normalize differently
// (dual norm) and the two should not mix silently.
class Functional {
public:
    Functional() = default;
    explicit Functional(Vector coeffs) : c_(std::move(coeffs)) {}
    Functional(std::initializer_list<Rat> coeffs) : c_(coeffs) {}

    static Functional from(const DVec& d) { return Functional(Vector::from(d)); }

    [[nodiscard]] int dim() const { return c_.dim(); }
    [[nodiscard]] const Vector& coeffs() const { return c_; }
    [[nodiscard]] const Rat& operator[](int i) const { return c_[i]; }

    [[nodiscard]] Rat operator()(const Vector& x) const {
        if (x.dim() != dim()) throw DimensionMismatch("functional/vector dimension mismatch");
        Rat s = 0;
        for (int i = 0; i < dim(); ++i) s += c_[i] * x[i];
        return s;
    }

    [[nodiscard]] double operator()(const DVec& x) const {
        return approx().dot(x);
    }

    [[nodiscard]] DVec approx() const { return c_.approx(); }
    [[nodiscard]] Functional scaled(const Rat& s) const { return Functional(c_.scaled(s)); }
    [[nodiscard]] Functional operator-() const { return Functional(-c_); }
    [[nodiscard]] std::string str() const { return c_.str(); }

private:
    Vector c_;
};

// Row-major n x n matrix with rational entries; the operator constructions
// stay exact whenever the inputs are exact.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n) : n_(n) {
        if (n < kMinDim || n > kMaxDim)
            throw DimensionMismatch("matrix dimension outside supported range [2,4]");
    }

    static Matrix identity(int n) {
        Matrix m(n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        m.refresh();
        return m;
    }

    [[nodiscard]] int dim() const { return n_; }

    [[nodiscard]] Rat& at(int r, int c) { return e_[static_cast<size_t>(r * kMaxDim + c)]; }
    [[nodiscard]] const Rat& at(int r, int c) const { return e_[static_cast<size_t>(r * kMaxDim + c)]; }

    [[nodiscard]] Vector apply(const Vector& x) const {
        if (x.dim() != n_) throw DimensionMismatch("matrix/vector dimension mismatch");
        Vector y = Vector::zeros(n_);
        for (int r = 0; r < n_; ++r) {
            Rat s = 0;
            for (int c = 0; c < n_; ++c) s += at(r, c) * x[c];
            y[r] = s;
        }
        return y;
    }

    // y = A x in doubles, for scan loops.
    [[nodiscard]] DVec apply(const DVec& x) const {
        DVec y;
        y.n = n_;
        for (int r = 0; r < n_; ++r) {
            double s = 0;
            for (int c = 0; c < n_; ++c) s += ed_[static_cast<size_t>(r * kMaxDim + c)] * x[c];
            y[r] = s;
        }
        return y;
    }

    // g = f A (row covector times matrix), the composition f o A.
    [[nodiscard]] Functional compose(const Functional& f) const {
        if (f.dim() != n_) throw DimensionMismatch("functional/matrix dimension mismatch");
        Vector g = Vector::zeros(n_);
        for (int c = 0; c < n_; ++c) {
            Rat s = 0;
            for (int r = 0; r < n_; ++r) s += f[r] * at(r, c);
            g[c] = s;
        }
        return Functional(g);
    }

    [[nodiscard]] Matrix multiply(const Matrix& o) const {
        Matrix m(n_);
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c) {
                Rat s = 0;
                for (int k = 0; k < n_; ++k) s += at(r, k) * o.at(k, c);
                m.at(r, c) = s;
            }
        m.refresh();
        return m;
    }

    // Must be called after hand-editing entries so the double mirror used by
    // apply(DVec) stays in sync.
    void refresh() {
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c)
                ed_[static_cast<size_t>(r * kMaxDim + c)] = to_double(at(r, c));
    }

private:
    std::array<Rat, kMaxDim * kMaxDim> e_{};
    std::array<double, kMaxDim * kMaxDim> ed_{};
    int n_ = 0;
};

} // namespace nsg
