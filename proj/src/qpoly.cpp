#include "qpd/qpoly.hpp"

#include <stdexcept>
#include <utility>

namespace qpd {

namespace {
const mpz_class kZero = 0;
}

QPoly::QPoly(std::vector<mpz_class> coefficients) : coeffs_(std::move(coefficients)) {
    trim();
}

QPoly QPoly::constant(long value) {
    QPoly p;
    if (value != 0) p.coeffs_.assign(1, mpz_class(value));
    return p;
}

QPoly QPoly::monomial(int power, long coefficient) {
    if (power < 0) throw std::invalid_argument("QPoly::monomial: negative power");
    QPoly p;
    if (coefficient != 0) {
        p.coeffs_.assign(static_cast<size_t>(power) + 1, kZero);
        p.coeffs_.back() = coefficient;
    }
    return p;
}

const mpz_class& QPoly::coeff(int power) const {
    if (power < 0 || power >= static_cast<int>(coeffs_.size())) return kZero;
    return coeffs_[static_cast<size_t>(power)];
}

void QPoly::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

QPoly& QPoly::operator+=(const QPoly& other) {
    if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), kZero);
    for (size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    trim();
    return *this;
}

QPoly& QPoly::operator-=(const QPoly& other) {
    if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), kZero);
    for (size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    trim();
    return *this;
}

QPoly operator*(const QPoly& a, const QPoly& b) {
    if (a.is_zero() || b.is_zero()) return QPoly();
    std::vector<mpz_class> out(a.coeffs_.size() + b.coeffs_.size() - 1, mpz_class(0));
    for (size_t i = 0; i < a.coeffs_.size(); ++i) {
        if (a.coeffs_[i] == 0) continue;
        for (size_t j = 0; j < b.coeffs_.size(); ++j)
            out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return QPoly(std::move(out));
}

QPoly& QPoly::operator*=(const QPoly& other) {
    *this = *this * other;
    return *this;
}

QPoly QPoly::shifted(int k) const {
    if (k < 0) throw std::invalid_argument("QPoly::shifted: negative shift");
    if (is_zero() || k == 0) return *this;
    std::vector<mpz_class> out(coeffs_.size() + static_cast<size_t>(k), kZero);
    for (size_t i = 0; i < coeffs_.size(); ++i) out[i + static_cast<size_t>(k)] = coeffs_[i];
    return QPoly(std::move(out));
}

mpz_class QPoly::eval_at_one() const {
    mpz_class acc = 0;
    for (const auto& c : coeffs_) acc += c;
    return acc;
}

mpq_class QPoly::evaluate(const mpq_class& q) const {
    mpq_class acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * q + *it;
    return acc;
}

double QPoly::evaluate(double q) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * q + it->get_d();
    return acc;
}

std::string QPoly::to_string() const {
    if (coeffs_.empty()) return "0";
    std::string out;
    bool first = true;
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        const mpz_class& c = coeffs_[i];
        if (c == 0) continue;
        mpz_class a = abs(c);
        if (first) {
            if (c < 0) out += "-";
            first = false;
        } else {
            out += (c < 0) ? " - " : " + ";
        }
        if (i == 0) {
            out += a.get_str();
            continue;
        }
        if (a != 1) out += a.get_str();
        out += "q";
        if (i > 1) {
            out += "^";
            out += std::to_string(i);
        }
    }
    return out;
}

} // namespace qpd
