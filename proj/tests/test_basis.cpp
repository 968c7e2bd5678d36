#include "algset/basis.hpp"
#include "algset/numeric.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace algset;

namespace {

std::vector<int> vars_of(const MonomialBasis& basis, std::size_t r) {
    return basis.at(r).variables();
}

} // namespace

TEST_CASE("build_basis d=2 g=2 reproduces the canonical listing") {
    const auto basis = MonomialBasis::build(2, 2);
    REQUIRE(basis.size() == 6);
    // 1, x1, x2, x1*x2, x1^2, x2^2
    CHECK(vars_of(basis, 0) == std::vector<int>{0, 0});
    CHECK(vars_of(basis, 1) == std::vector<int>{1, 0});
    CHECK(vars_of(basis, 2) == std::vector<int>{0, 1});
    CHECK(vars_of(basis, 3) == std::vector<int>{1, 1});
    CHECK(vars_of(basis, 4) == std::vector<int>{2, 0});
    CHECK(vars_of(basis, 5) == std::vector<int>{0, 2});
    // rank/unrank round trip
    for (std::size_t r = 0; r < basis.size(); ++r) CHECK(basis.rank(basis.at(r)) == r);
}

TEST_CASE("build_basis cardinalities and validation") {
    CHECK(MonomialBasis::build(3, 2).size() == 10);
    const auto b13 = MonomialBasis::build(1, 3);
    REQUIRE(b13.size() == 4);
    CHECK(vars_of(b13, 0) == std::vector<int>{0});
    CHECK(vars_of(b13, 1) == std::vector<int>{1});
    CHECK(vars_of(b13, 2) == std::vector<int>{2});
    CHECK(vars_of(b13, 3) == std::vector<int>{3});

    CHECK_THROWS_AS(MonomialBasis::build(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(MonomialBasis::build(2, 0), std::invalid_argument);
}

TEST_CASE("veronese evaluation") {
    const auto basis = MonomialBasis::build(2, 2);
    Eigen::VectorXd x(2);
    x << 2.0, 3.0;
    const Eigen::VectorXd phi = veronese(basis, x);
    Eigen::VectorXd expected(6);
    expected << 1.0, 2.0, 3.0, 6.0, 4.0, 9.0;
    CHECK((phi - expected).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::VectorXd at_zero = veronese(basis, Eigen::Vector2d::Zero());
    CHECK(at_zero(0) == 1.0);
    CHECK(at_zero.tail(5).cwiseAbs().maxCoeff() == 0.0);

    Eigen::VectorXd wrong(3);
    wrong << 1.0, 2.0, 3.0;
    CHECK_THROWS_AS(veronese(basis, wrong), std::invalid_argument);
}

TEST_CASE("from_variable_exponents keeps the stored order") {
    const auto canonical = MonomialBasis::build(2, 2);
    std::vector<std::vector<int>> reversed;
    for (std::size_t r = canonical.size(); r-- > 0;) reversed.push_back(vars_of(canonical, r));
    const auto basis = MonomialBasis::from_variable_exponents(2, 2, reversed);
    CHECK(vars_of(basis, 0) == std::vector<int>{0, 2});
    CHECK(basis.rank_of_variables({0, 0}) == 5);

    auto bad = reversed;
    bad[0] = {5, 0};
    CHECK_THROWS_AS(MonomialBasis::from_variable_exponents(2, 2, bad), std::invalid_argument);
}

TEST_SUITE("properties") {

TEST_CASE("basis cardinality is C(d+g, d) for all desk-scale sizes") {
    for (int d = 1; d <= 4; ++d) {
        for (int g = 1; g <= 5; ++g) {
            const auto basis = MonomialBasis::build(d, g);
            CHECK(basis.size() == binomial(d + g, d));
            // every element sums to g and is nonnegative
            for (const auto& e : basis.elements()) {
                CHECK(e.total() == g);
                CHECK(*std::min_element(e.exponents.begin(), e.exponents.end()) >= 0);
            }
        }
    }
}

TEST_CASE("weighted Veronese inner product reproduces the polynomial kernel") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    for (int d = 1; d <= 3; ++d) {
        for (int g = 1; g <= 4; ++g) {
            const auto basis = MonomialBasis::build(d, g);
            for (int trial = 0; trial < 5; ++trial) {
                Eigen::VectorXd x(d), y(d);
                for (int j = 0; j < d; ++j) {
                    x(j) = unif(rng);
                    y(j) = unif(rng);
                }
                const Eigen::VectorXd px = veronese(basis, x);
                const Eigen::VectorXd py = veronese(basis, y);
                double weighted = 0.0;
                for (std::size_t r = 0; r < basis.size(); ++r) {
                    weighted += multinomial_weight(basis.at(r)) *
                                px(static_cast<Eigen::Index>(r)) * py(static_cast<Eigen::Index>(r));
                }
                const double kernel = std::pow(1.0 + x.dot(y), g);
                CHECK(std::abs(weighted - kernel) <= 1e-10 * std::max(1.0, std::abs(kernel)));
            }
        }
    }
}

TEST_CASE("canonical order is a strict total order") {
    const auto basis = MonomialBasis::build(3, 3);
    const auto& e = basis.elements();
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK_FALSE(MonomialBasis::canonical_less(e[i], e[i]));
        for (std::size_t j = i + 1; j < e.size(); ++j) {
            // list is sorted, so i < j must order i before j (exhaustive + antisymmetric)
            CHECK(MonomialBasis::canonical_less(e[i], e[j]));
            CHECK_FALSE(MonomialBasis::canonical_less(e[j], e[i]));
            // transitivity through every k
            for (std::size_t k = j + 1; k < e.size(); ++k) {
                if (MonomialBasis::canonical_less(e[i], e[j]) &&
                    MonomialBasis::canonical_less(e[j], e[k])) {
                    CHECK(MonomialBasis::canonical_less(e[i], e[k]));
                }
            }
        }
    }
}

} // TEST_SUITE
