#pragma once

// Forward-mode dual numbers with a fixed-size gradient. Flux and residual
// kernels are templated on the scalar type so the same code evaluates plain
// doubles and values carrying exact first derivatives.

#include <array>
#include <cmath>
#include <ostream>

namespace huflow {

template <int N>
class Dual {
public:
    static constexpr int size = N;

    constexpr Dual() = default;
    constexpr Dual(double value) : v_(value) {}  // NOLINT: implicit constants are intended

    static Dual variable(double value, int index)
    {
        Dual x(value);
        x.d_[index] = 1.0;
        return x;
    }

    constexpr double value() const { return v_; }
    constexpr double derivative(int index) const { return d_[index]; }
    constexpr const std::array<double, N>& gradient() const { return d_; }
    std::array<double, N>& gradient() { return d_; }

    /// Chain rule for a scalar function: returns f(x) given f and f'(x).
    Dual apply(double f, double df) const
    {
        Dual r(f);
        for (int k = 0; k < N; ++k) r.d_[k] = df * d_[k];
        return r;
    }

    Dual& operator+=(const Dual& o)
    {
        v_ += o.v_;
        for (int k = 0; k < N; ++k) d_[k] += o.d_[k];
        return *this;
    }
    Dual& operator-=(const Dual& o)
    {
        v_ -= o.v_;
        for (int k = 0; k < N; ++k) d_[k] -= o.d_[k];
        return *this;
    }
    Dual& operator*=(const Dual& o)
    {
        for (int k = 0; k < N; ++k) d_[k] = d_[k] * o.v_ + v_ * o.d_[k];
        v_ *= o.v_;
        return *this;
    }
    Dual& operator/=(const Dual& o)
    {
        const double inv = 1.0 / o.v_;
        const double q = v_ * inv;
        for (int k = 0; k < N; ++k) d_[k] = (d_[k] - q * o.d_[k]) * inv;
        v_ = q;
        return *this;
    }
    Dual& operator+=(double c) { v_ += c; return *this; }
    Dual& operator-=(double c) { v_ -= c; return *this; }
    Dual& operator*=(double c)
    {
        v_ *= c;
        for (auto& g : d_) g *= c;
        return *this;
    }
    Dual& operator/=(double c) { return *this *= (1.0 / c); }

    Dual operator-() const
    {
        Dual r(-v_);
        for (int k = 0; k < N; ++k) r.d_[k] = -d_[k];
        return r;
    }

private:
    double v_ = 0.0;
    std::array<double, N> d_{};
};

template <int N> Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N> Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N> Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <int N> Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <int N> Dual<N> operator+(Dual<N> a, double c) { return a += c; }
template <int N> Dual<N> operator-(Dual<N> a, double c) { return a -= c; }
template <int N> Dual<N> operator*(Dual<N> a, double c) { return a *= c; }
template <int N> Dual<N> operator/(Dual<N> a, double c) { return a /= c; }
template <int N> Dual<N> operator+(double c, Dual<N> a) { return a += c; }
template <int N> Dual<N> operator-(double c, const Dual<N>& a) { return -a + c; }
template <int N> Dual<N> operator*(double c, Dual<N> a) { return a *= c; }
template <int N> Dual<N> operator/(double c, const Dual<N>& a) { return Dual<N>(c) / a; }

template <int N>
Dual<N> atan(const Dual<N>& x)
{
    const double v = x.value();
    return x.apply(std::atan(v), 1.0 / (1.0 + v * v));
}

template <int N>
std::ostream& operator<<(std::ostream& os, const Dual<N>& x)
{
    return os << x.value();
}

inline double value_of(double x) { return x; }
template <int N> double value_of(const Dual<N>& x) { return x.value(); }

/// f(x) for a scalar function whose value and slope at value_of(x) are known.
inline double chain(double, double f, double) { return f; }
template <int N> Dual<N> chain(const Dual<N>& x, double f, double df) { return x.apply(f, df); }

using std::atan;

}  // namespace huflow
