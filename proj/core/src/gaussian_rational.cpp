#include "quasiode/gaussian_rational.hpp"

#include "quasiode/error.hpp"

namespace quasiode {

GaussRational::GaussRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
}

GaussRational GaussRational::frac(long num, long den) {
    mpq_class q(num, den);
    q.canonicalize();
    return {q};
}

GaussRational GaussRational::i_pow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0:
            return {1};
        case 1:
            return {0, 1};
        case 2:
            return {-1};
        default:
            return {0, -1};
    }
}

GaussRational& GaussRational::operator+=(const GaussRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

GaussRational& GaussRational::operator-=(const GaussRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

GaussRational& GaussRational::operator*=(const GaussRational& o) {
    mpq_class re = re_ * o.re_ - im_ * o.im_;
    mpq_class im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

GaussRational& GaussRational::operator/=(const GaussRational& o) {
    if (o.is_zero()) throw AssertionError("division by zero Gaussian rational");
    const mpq_class den = o.re_ * o.re_ + o.im_ * o.im_;
    mpq_class re = (re_ * o.re_ + im_ * o.im_) / den;
    mpq_class im = (im_ * o.re_ - re_ * o.im_) / den;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

std::string GaussRational::str() const {
    const bool has_re = sgn(re_) != 0, has_im = sgn(im_) != 0;
    if (!has_im) return re_.get_str();
    std::string im;
    if (im_ == 1)
        im = "i";
    else if (im_ == -1)
        im = "-i";
    else
        im = im_.get_str() + "i";
    if (!has_re) return im;
    return "(" + re_.get_str() + (sgn(im_) > 0 ? "+" : "") + im + ")";
}

}  // namespace quasiode
