#include <doctest.h>

#include <cmath>
#include <numbers>

#include "shearband/errors.hpp"
#include "shearband/linstab.hpp"

using namespace shearband;
namespace ls = shearband::linstab;
constexpr double pi = std::numbers::pi;

TEST_SUITE("linstab") {

// [DERIVED] the closed forms are roots of the characteristic quadratic
// lambda^2 + lambda(1 + n pi^2 j^2) - (1-n) pi^2 j^2 = 0, checked independently.
TEST_CASE("eigenvalues satisfy the characteristic quadratic") {
    for (double n : {0.0, 0.05, 0.3, 0.5, 0.9, 1.2}) {
        for (int j : {1, 2, 7, 40, 1000}) {
            auto [lp, lm] = ls::eigenvalues(j, n);
            double b = 1.0 + n * pi * pi * j * j;
            double cc = (1.0 - n) * pi * pi * j * j;
            double scale = std::max(1.0, std::max(lp * lp, lm * lm));
            CHECK(std::abs(lp * lp + b * lp - cc) < 1e-9 * scale);
            CHECK(std::abs(lm * lm + b * lm - cc) < 1e-9 * scale);
        }
    }
}

// [DERIVED] eigenvectors: A v = lambda v against the 2x2 mode matrix.
TEST_CASE("eigenvectors solve the mode system") {
    for (double n : {0.05, 0.3, 0.9}) {
        for (int j : {1, 5, 31}) {
            auto e = ls::mode_entry(j, n);
            auto A = ls::mode_matrix(j, n);
            auto resid = [&](double lam, const std::array<double, 2>& v) {
                double r0 = A[0][0] * v[0] + A[0][1] * v[1] - lam * v[0];
                double r1 = A[1][0] * v[0] + A[1][1] * v[1] - lam * v[1];
                return std::max(std::abs(r0), std::abs(r1));
            };
            CHECK(resid(e.lambda_plus, e.eigvec_plus) < 1e-9 * std::max(1.0, pi * pi * j * j));
            CHECK(resid(e.lambda_minus, e.eigvec_minus) < 1e-9 * std::max(1.0, pi * pi * j * j));
            // Unit norm, first nonzero component positive.
            double nrm = std::hypot(e.eigvec_plus[0], e.eigvec_plus[1]);
            CHECK(nrm == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(e.eigvec_plus[0] >= 0.0);
        }
    }
}

// [PAPER] instability ordering: lambda^- < 0 < lambda^+_j for all j >= 1 when n < 1.
TEST_CASE("sign pattern for n < 1") {
    for (double n : {0.0, 0.05, 0.3, 0.5, 0.9})
        for (int j = 1; j <= 200; ++j) {
            auto [lp, lm] = ls::eigenvalues(j, n);
            CHECK(lp > 0.0);
            CHECK(lm < 0.0);
        }
}

// [PAPER] Hadamard case n = 0: growth rates increase without bound, and the three
// term expansion pi j - 1/2 + 1/(8 pi j) is accurate at moderate j.
TEST_CASE("n = 0 Hadamard asymptotics") {
    double prev = 0.0;
    for (int j = 1; j <= 2000; ++j) {
        double lp = ls::eigenvalues(j, 0.0)[0];
        CHECK(lp > prev);
        prev = lp;
    }
    CHECK(prev > 1000.0); // unbounded in practice
    CHECK(std::abs(ls::eigenvalues(10, 0.0)[0] - ls::hadamard_asymptotics_plus(10)) < 1e-4);
    CHECK(std::abs(ls::eigenvalues(10, 0.0)[1] - ls::hadamard_asymptotics_minus(10)) < 1e-4);
    CHECK(ls::classify(0.0) == ls::Classification::Hadamard);
}

// [PAPER] Turing case 0 < n < 1: lambda^+_j increases toward the bound (1-n)/n.
TEST_CASE("Turing bound for 0 < n < 1") {
    for (double n : {0.05, 0.3, 0.5, 0.9}) {
        double bound = ls::turing_bound(n);
        CHECK(bound == doctest::Approx((1.0 - n) / n).epsilon(1e-14));
        double prev = 0.0;
        for (int j = 1; j <= 1000; ++j) {
            double lp = ls::eigenvalues(j, n)[0];
            CHECK(lp < bound);
            CHECK(lp > prev);
            prev = lp;
        }
        CHECK(prev > 0.99 * bound); // approaches the bound
        CHECK(ls::classify(n) == ls::Classification::Turing);
    }
    CHECK_THROWS_AS(ls::turing_bound(0.0), DomainError);
}

// [PAPER] n >= 1 is linearly stable; n = 1.2 both rates negative or zero.
TEST_CASE("stability for n >= 1") {
    CHECK(ls::classify(1.2) == ls::Classification::Stable);
    for (int j = 1; j <= 50; ++j) {
        auto [lp, lm] = ls::eigenvalues(j, 1.2);
        CHECK(lp <= 0.0);
        CHECK(lm < 0.0);
    }
}

// [PAPER] frozen values: lambda^+_1(n=0) = (-1 + sqrt(1 + 4 pi^2))/2, and the
// n = 0.3 rate used by the linearized PDE check.
TEST_CASE("frozen oracle values") {
    CHECK(ls::eigenvalues(1, 0.0)[0] ==
          doctest::Approx((-1.0 + std::sqrt(1.0 + 4.0 * pi * pi)) / 2.0).epsilon(1e-14));
    CHECK(ls::eigenvalues(1, 0.3)[0] == doctest::Approx(1.3105878).epsilon(1e-6));
}

// [TRIVIAL] spectrum container and the constrained j = 0 entry {0, -1}.
TEST_CASE("spectrum and the j = 0 entry") {
    auto sp = ls::spectrum(0.3, 8);
    REQUIRE(sp.entries.size() == 9);
    CHECK(sp.entries[0].j == 0);
    CHECK(sp.entries[0].constrained);
    CHECK(sp.entries[0].lambda_plus == 0.0);
    CHECK(sp.entries[0].lambda_minus == -1.0);
    for (int j = 1; j <= 8; ++j)
        CHECK(sp.entries[static_cast<size_t>(j)].j == j);
}

} // TEST_SUITE
