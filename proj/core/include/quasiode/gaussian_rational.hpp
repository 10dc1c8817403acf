#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace quasiode {

/// Exact a + b i with arbitrary-precision rational parts.
class GaussRational {
public:
    GaussRational() = default;
    GaussRational(long re) : re_(re) {}  // NOLINT(google-explicit-constructor)
    GaussRational(mpq_class re, mpq_class im = 0);

    static GaussRational i() { return {0, 1}; }
    static GaussRational frac(long num, long den);

    const mpq_class& re() const noexcept { return re_; }
    const mpq_class& im() const noexcept { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    GaussRational conj() const { return {re_, -im_}; }
    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    /// i^k for any integer k.
    static GaussRational i_pow(int k);

    GaussRational& operator+=(const GaussRational& o);
    GaussRational& operator-=(const GaussRational& o);
    GaussRational& operator*=(const GaussRational& o);
    /// Division by a nonzero Gaussian rational.
    GaussRational& operator/=(const GaussRational& o);

    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
    friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
    friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
    GaussRational operator-() const { return {-re_, -im_}; }

    friend bool operator==(const GaussRational& a, const GaussRational& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

    /// "3", "-1/2", "2i", "(1-3i)", "(1/2+i)".
    std::string str() const;

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

}  // namespace quasiode
