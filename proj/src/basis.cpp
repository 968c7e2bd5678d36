#include "algset/basis.hpp"

#include "algset/numeric.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace algset {

int MultiIndex::total() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
}

std::vector<int> MultiIndex::variables() const {
    return {exponents.begin() + 1, exponents.end()};
}

bool MonomialBasis::canonical_less(const MultiIndex& a, const MultiIndex& b) {
    const int da = a.monomial_degree();
    const int db = b.monomial_degree();
    if (da != db) return da < db;

    const auto va = a.variables();
    const auto vb = b.variables();
    const int ma = va.empty() ? 0 : *std::max_element(va.begin(), va.end());
    const int mb = vb.empty() ? 0 : *std::max_element(vb.begin(), vb.end());
    if (ma != mb) return ma < mb;

    // descending lexicographic tie-break on the variable exponents
    return std::lexicographical_compare(vb.begin(), vb.end(), va.begin(), va.end());
}

namespace {

void enumerate(int slots, int remaining, std::vector<int>& current,
               std::vector<MultiIndex>& out) {
    if (slots == 1) {
        current.push_back(remaining);
        out.push_back(MultiIndex{current});
        current.pop_back();
        return;
    }
    for (int e = 0; e <= remaining; ++e) {
        current.push_back(e);
        enumerate(slots - 1, remaining - e, current, out);
        current.pop_back();
    }
}

} // namespace

MonomialBasis MonomialBasis::build(int d, int g) {
    if (d < 1 || g < 1) {
        throw std::invalid_argument("MonomialBasis::build: require d >= 1 and g >= 1");
    }
    MonomialBasis basis(d, g);
    std::vector<int> current;
    enumerate(d + 1, g, current, basis.elements_);
    std::sort(basis.elements_.begin(), basis.elements_.end(), canonical_less);

    for (std::size_t r = 0; r < basis.elements_.size(); ++r) {
        basis.rank_.emplace(basis.elements_[r].exponents, r);
    }
    return basis;
}

MonomialBasis MonomialBasis::from_variable_exponents(
    int d, int g, const std::vector<std::vector<int>>& vars) {
    MonomialBasis canonical = build(d, g);
    if (vars.size() != canonical.size()) {
        throw std::invalid_argument("MonomialBasis::from_variable_exponents: wrong element count");
    }
    MonomialBasis basis(d, g);
    for (const auto& v : vars) {
        if (static_cast<int>(v.size()) != d) {
            throw std::invalid_argument(
                "MonomialBasis::from_variable_exponents: exponent vector has wrong dimension");
        }
        const int var_total = std::accumulate(v.begin(), v.end(), 0);
        if (var_total > g) {
            throw std::invalid_argument(
                "MonomialBasis::from_variable_exponents: monomial degree exceeds g");
        }
        std::vector<int> full;
        full.reserve(v.size() + 1);
        full.push_back(g - var_total);
        full.insert(full.end(), v.begin(), v.end());
        MultiIndex idx{full};
        if (!canonical.contains(idx)) {
            throw std::invalid_argument("MonomialBasis::from_variable_exponents: invalid element");
        }
        if (!basis.rank_.emplace(full, basis.elements_.size()).second) {
            throw std::invalid_argument("MonomialBasis::from_variable_exponents: duplicate element");
        }
        basis.elements_.push_back(std::move(idx));
    }
    return basis;
}

std::size_t MonomialBasis::rank(const MultiIndex& idx) const {
    auto it = rank_.find(idx.exponents);
    if (it == rank_.end()) {
        throw std::invalid_argument("MonomialBasis::rank: multi-index not in basis");
    }
    return it->second;
}

std::size_t MonomialBasis::rank_of_variables(const std::vector<int>& vars) const {
    const int var_total = std::accumulate(vars.begin(), vars.end(), 0);
    std::vector<int> full;
    full.reserve(vars.size() + 1);
    full.push_back(g_ - var_total);
    full.insert(full.end(), vars.begin(), vars.end());
    auto it = rank_.find(full);
    if (it == rank_.end()) {
        throw std::invalid_argument("MonomialBasis::rank_of_variables: monomial not in basis");
    }
    return it->second;
}

bool MonomialBasis::contains(const MultiIndex& idx) const {
    return rank_.find(idx.exponents) != rank_.end();
}

bool MonomialBasis::operator==(const MonomialBasis& other) const {
    return d_ == other.d_ && g_ == other.g_ && elements_ == other.elements_;
}

Eigen::VectorXd veronese(const MonomialBasis& basis, const Eigen::VectorXd& x) {
    if (x.size() != basis.dimension()) {
        throw std::invalid_argument("veronese: point dimension does not match basis");
    }
    Eigen::VectorXd phi(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t r = 0; r < basis.size(); ++r) {
        const auto& e = basis.at(r).exponents;
        double v = 1.0;
        for (int j = 1; j < static_cast<int>(e.size()); ++j) {
            v *= ipow(x(j - 1), e[static_cast<std::size_t>(j)]);
        }
        phi(static_cast<Eigen::Index>(r)) = v;
    }
    return phi;
}

double multinomial_weight(const MultiIndex& idx) {
    double w = factorial_d(idx.total());
    for (int e : idx.exponents) w /= factorial_d(e);
    return w;
}

} // namespace algset
