#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace qpd {

/* Integer-coefficient polynomial in the deformation parameter q, stored
 * densely by ascending power.  Canonical form carries no trailing zero
 * coefficients; the zero polynomial stores an empty vector and reports
 * degree -1. */
class QPoly {
public:
    QPoly() = default;
    explicit QPoly(std::vector<mpz_class> coefficients);

    static QPoly constant(long value);
    static QPoly monomial(int power, long coefficient = 1);

    bool is_zero() const { return coeffs_.empty(); }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const mpz_class& coeff(int power) const;
    const std::vector<mpz_class>& coefficients() const { return coeffs_; }

    QPoly& operator+=(const QPoly& other);
    QPoly& operator-=(const QPoly& other);
    QPoly& operator*=(const QPoly& other);
    friend QPoly operator+(QPoly a, const QPoly& b) { a += b; return a; }
    friend QPoly operator-(QPoly a, const QPoly& b) { a -= b; return a; }
    friend QPoly operator*(const QPoly& a, const QPoly& b);
    friend bool operator==(const QPoly& a, const QPoly& b) = default;

    // Multiply by q^k.
    QPoly shifted(int k) const;

    // Value at q = 1, i.e. the plain coefficient sum.
    mpz_class eval_at_one() const;
    mpq_class evaluate(const mpq_class& q) const;
    double evaluate(double q) const;

    /* Ascending-power rendering with integer coefficients, e.g.
     * "2q + q^2"; the zero polynomial prints "0". */
    std::string to_string() const;

private:
    void trim();
    std::vector<mpz_class> coeffs_;
};

} // namespace qpd
