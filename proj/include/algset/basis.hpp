#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <vector>

namespace algset {

// Exponent vector (i_0, i_1, ..., i_d) with the homogenizing slot first.
// Members of a degree-g basis all have total() == g; the actual monomial
// degree is total() - exponents[0].
struct MultiIndex {
    std::vector<int> exponents;

    int total() const;
    int monomial_degree() const { return total() - exponents.front(); }
    int dimension() const { return static_cast<int>(exponents.size()) - 1; }

    // variable part (i_1, ..., i_d)
    std::vector<int> variables() const;

    bool operator==(const MultiIndex& other) const = default;
};

// Graded monomial basis B_{d,g} under the canonical total order:
//   1. ascending monomial degree,
//   2. then ascending max of the variable exponents,
//   3. then descending lexicographic order on (i_1, ..., i_d).
// For d = 2, g = 2 this yields 1, x1, x2, x1*x2, x1^2, x2^2.
class MonomialBasis {
public:
    static MonomialBasis build(int d, int g);

    // Rebuild from an explicit ordered list of variable-exponent vectors
    // (as stored in model files). The list must be a permutation of the
    // canonical element set; the given order is kept verbatim.
    static MonomialBasis from_variable_exponents(int d, int g,
                                                 const std::vector<std::vector<int>>& vars);

    int dimension() const { return d_; }
    int degree() const { return g_; }
    std::size_t size() const { return elements_.size(); } // kappa = C(d+g, d)

    const MultiIndex& at(std::size_t r) const { return elements_.at(r); }
    const std::vector<MultiIndex>& elements() const { return elements_; }

    // the bijection tau: B_{d,g} -> {0, ..., kappa-1}
    std::size_t rank(const MultiIndex& idx) const;
    std::size_t rank_of_variables(const std::vector<int>& vars) const;
    bool contains(const MultiIndex& idx) const;

    // strict canonical order; total order on any fixed B_{d,g}
    static bool canonical_less(const MultiIndex& a, const MultiIndex& b);

    bool operator==(const MonomialBasis& other) const;

private:
    MonomialBasis(int d, int g) : d_(d), g_(g) {}

    int d_ = 0;
    int g_ = 0;
    std::vector<MultiIndex> elements_;
    std::map<std::vector<int>, std::size_t> rank_; // keyed by full exponent vector
};

// phi(x): entry at rank(i) equals x~^i with the 0^0 = 1 convention.
Eigen::VectorXd veronese(const MonomialBasis& basis, const Eigen::VectorXd& x);

// multinomial weight g! / (i_0! i_1! ... i_d!); with these weights the
// Veronese inner product reproduces the polynomial kernel (1 + x.y)^g
double multinomial_weight(const MultiIndex& idx);

} // namespace algset
