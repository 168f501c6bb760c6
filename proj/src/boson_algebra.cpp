#include "trimer/boson_algebra.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace trimer::boson {

namespace {

// Expand a word into canonical words using x_i x_j^dag = x_j^dag x_i + delta_ij.
void normal_order(Word w, Complex c, std::vector<std::pair<Word, Complex>>& out) {
    for (std::size_t p = 0; p + 1 < w.size(); ++p) {
        if (!w[p].dagger && w[p + 1].dagger) {
            if (w[p].mode == w[p + 1].mode) {
                Word contracted;
                contracted.reserve(w.size() - 2);
                contracted.insert(contracted.end(), w.begin(), w.begin() + p);
                contracted.insert(contracted.end(), w.begin() + p + 2, w.end());
                normal_order(std::move(contracted), c, out);
            }
            std::swap(w[p], w[p + 1]);
            normal_order(std::move(w), c, out);
            return;
        }
    }
    // Daggers now precede annihilators; each group commutes internally.
    auto split = std::find_if(w.begin(), w.end(), [](const Ladder& l) { return !l.dagger; });
    std::sort(w.begin(), split);
    std::sort(split, w.end());
    out.emplace_back(std::move(w), c);
}

}  // namespace

Polynomial::Polynomial(Complex scalar) {
    if (scalar != Complex(0.0)) terms_[Word{}] = scalar;
}

Polynomial Polynomial::ladder(int mode, bool dagger) {
    Polynomial p;
    p.terms_[Word{Ladder{mode, dagger}}] = 1.0;
    return p;
}

Complex Polynomial::coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Complex(0.0) : it->second;
}

int Polynomial::max_degree() const {
    int d = -1;
    for (const auto& [w, c] : terms_) d = std::max(d, static_cast<int>(w.size()));
    return d;
}

void Polynomial::add_word(const Word& w, Complex c) {
    std::vector<std::pair<Word, Complex>> expanded;
    normal_order(w, c, expanded);
    for (auto& [word, coef] : expanded) {
        auto [it, inserted] = terms_.try_emplace(std::move(word), coef);
        if (!inserted) {
            it->second += coef;
            if (it->second == Complex(0.0)) terms_.erase(it);
        }
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    for (const auto& [w, c] : rhs.terms_) add_word(w, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    for (const auto& [w, c] : rhs.terms_) add_word(w, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(Complex s) {
    if (s == Complex(0.0)) {
        terms_.clear();
        return *this;
    }
    for (auto& [w, c] : terms_) c *= s;
    return *this;
}

Polynomial operator*(const Polynomial& l, const Polynomial& r) {
    Polynomial out;
    for (const auto& [wl, cl] : l.terms_) {
        for (const auto& [wr, cr] : r.terms_) {
            Word w = wl;
            w.insert(w.end(), wr.begin(), wr.end());
            out.add_word(w, cl * cr);
        }
    }
    return out;
}

Polynomial Polynomial::pruned(double eps) const {
    Polynomial out;
    for (const auto& [w, c] : terms_) {
        if (std::abs(c) > eps) out.terms_.emplace(w, c);
    }
    return out;
}

std::string Polynomial::to_string(const std::vector<std::string>& mode_names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [w, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << '(' << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
        for (const auto& l : w) {
            os << ' ' << mode_names.at(static_cast<std::size_t>(l.mode)) << (l.dagger ? "+" : "");
        }
    }
    return os.str();
}

Polynomial commutator(const Polynomial& x, const Polynomial& y) { return x * y - y * x; }

}  // namespace trimer::boson
