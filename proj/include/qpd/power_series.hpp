#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace qpd {

/* Truncated power series in u.  Stores c_0..c_k with k <= order;
 * coefficients beyond the stored length read as zero.  Arithmetic between
 * two series is exact up to the smaller truncation order, which the
 * result adopts. */
template <class T>
class PowerSeries {
public:
    explicit PowerSeries(int order) : order_(order) {
        if (order < 0) throw std::invalid_argument("PowerSeries: negative order");
    }

    PowerSeries(int order, std::vector<T> coefficients) : PowerSeries(order) {
        if (static_cast<int>(coefficients.size()) > order + 1)
            coefficients.resize(static_cast<size_t>(order) + 1);
        coeffs_ = std::move(coefficients);
    }

    int order() const { return order_; }

    T coefficient(int n) const {
        if (n < 0 || n >= static_cast<int>(coeffs_.size())) return T(0);
        return coeffs_[static_cast<size_t>(n)];
    }

    void set_coefficient(int n, T value) {
        if (n < 0 || n > order_)
            throw std::out_of_range("PowerSeries: index beyond truncation order");
        if (n >= static_cast<int>(coeffs_.size())) coeffs_.resize(static_cast<size_t>(n) + 1, T(0));
        coeffs_[static_cast<size_t>(n)] = std::move(value);
    }

    PowerSeries& operator+=(const PowerSeries& other) {
        const int ord = order_ < other.order_ ? order_ : other.order_;
        PowerSeries out(ord);
        for (int n = 0; n <= ord; ++n) {
            T v = coefficient(n) + other.coefficient(n);
            if (!(v == T(0))) out.set_coefficient(n, std::move(v));
        }
        *this = std::move(out);
        return *this;
    }

    friend PowerSeries operator+(PowerSeries a, const PowerSeries& b) {
        a += b;
        return a;
    }

    PowerSeries scaled(const T& factor) const {
        PowerSeries out(order_);
        for (int n = 0; n < static_cast<int>(coeffs_.size()); ++n)
            out.set_coefficient(n, coeffs_[static_cast<size_t>(n)] * factor);
        return out;
    }

    // Cauchy product truncated at the smaller order.
    friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
        const int ord = a.order_ < b.order_ ? a.order_ : b.order_;
        PowerSeries out(ord);
        for (int n = 0; n <= ord; ++n) {
            T acc(0);
            for (int i = 0; i <= n; ++i) acc += a.coefficient(i) * b.coefficient(n - i);
            out.set_coefficient(n, std::move(acc));
        }
        return out;
    }

    // Horner evaluation of the stored truncation.
    T evaluate(const T& u) const {
        T acc(0);
        for (int n = static_cast<int>(coeffs_.size()) - 1; n >= 0; --n)
            acc = acc * u + coeffs_[static_cast<size_t>(n)];
        return acc;
    }

private:
    int order_;
    std::vector<T> coeffs_;
};

} // namespace qpd
