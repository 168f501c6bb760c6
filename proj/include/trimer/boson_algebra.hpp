// boson_algebra.hpp — normal-ordered polynomials in the ladder operators of a
// few bosonic modes, with products reduced by [x_i, x_j^dag] = delta_ij.

#pragma once

#include <complex>
#include <compare>
#include <map>
#include <string>
#include <vector>

namespace trimer::boson {

using Complex = std::complex<double>;

struct Ladder {
    int mode = 0;
    bool dagger = false;
    auto operator<=>(const Ladder&) const = default;
};

// A canonical word lists creation operators (sorted by mode) followed by
// annihilation operators (sorted by mode).
using Word = std::vector<Ladder>;

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(Complex scalar);

    static Polynomial ladder(int mode, bool dagger);
    static Polynomial create(int mode) { return ladder(mode, true); }
    static Polynomial annihilate(int mode) { return ladder(mode, false); }

    const std::map<Word, Complex>& terms() const noexcept { return terms_; }
    Complex coefficient(const Word& w) const;
    int max_degree() const;

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    Polynomial& operator*=(Complex s);

    friend Polynomial operator+(Polynomial l, const Polynomial& r) { return l += r; }
    friend Polynomial operator-(Polynomial l, const Polynomial& r) { return l -= r; }
    friend Polynomial operator*(Complex s, Polynomial p) { return p *= s; }
    friend Polynomial operator*(const Polynomial& l, const Polynomial& r);

    // Drops coefficients with |c| <= eps.
    Polynomial pruned(double eps = 0.0) const;

    std::string to_string(const std::vector<std::string>& mode_names) const;

private:
    void add_word(const Word& w, Complex c);  // normal-orders w before insertion
    std::map<Word, Complex> terms_;
};

Polynomial commutator(const Polynomial& x, const Polynomial& y);

}  // namespace trimer::boson
