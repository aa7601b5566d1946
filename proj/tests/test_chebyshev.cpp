#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hgm/chebyshev.hpp"
#include "hgm/reference.hpp"
#include "hgm/variational_fit.hpp"
#include "test_util.hpp"

using namespace hgm;
using hgm::test::SplitMix64;

TEST_CASE("cheb_points: small cases and invariants") {
    auto g3 = cheb_points(3, -1.0, 1.0);
    CHECK(g3.t[0] == -1.0);
    CHECK(g3.t[1] == 0.0);
    CHECK(g3.t[2] == 1.0);

    auto g2 = cheb_points(2, -1.0, 1.0);
    CHECK(g2.t[0] == -1.0);
    CHECK(g2.t[1] == 1.0);

    // n=5 on [0,2]: affine image of {-1, -sqrt2/2, 0, sqrt2/2, 1}
    auto g5 = cheb_points(5, 0.0, 2.0);
    CHECK(g5.t[0] == 0.0);
    CHECK(g5.t[1] == doctest::Approx(1 - std::sqrt(0.5)));
    CHECK(g5.t[2] == doctest::Approx(1.0));
    CHECK(g5.t[3] == doctest::Approx(1 + std::sqrt(0.5)));
    CHECK(g5.t[4] == 2.0);

    // ascending, symmetric about the midpoint
    for (int n : {6, 17}) {
        auto g = cheb_points(n, -1.0, 1.0);
        for (int i = 0; i + 1 < n; ++i) CHECK(g.x[i] < g.x[i + 1]);
        for (int i = 0; i < n; ++i) CHECK(g.x[i] == -g.x[n - 1 - i]);
    }
    CHECK_THROWS_AS(cheb_points(1, -1.0, 1.0), DomainError);
}

TEST_CASE("barycentric evaluation: exactness and node hits") {
    auto g = cheb_points(12, -1.0, 1.0);
    Vector<double> lin(12), cst(12);
    for (int i = 0; i < 12; ++i) {
        lin[i] = g.t[i];
        cst[i] = 3.25;
    }
    SplitMix64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        double t = rng.uniform(-1.0, 1.0);
        CHECK(std::fabs(barycentric_eval(g, lin, t) - t) < 1e-14);
        CHECK(std::fabs(barycentric_eval(g, cst, t) - 3.25) < 1e-14);
    }
    // exact passthrough at the nodes
    for (int i = 0; i < 12; ++i) CHECK(barycentric_eval(g, lin, g.t[i]) == g.t[i]);

    // interpolation of exp on 20 points
    auto g20 = cheb_points(20, -1.0, 1.0);
    Vector<double> ev(20);
    for (int i = 0; i < 20; ++i) ev[i] = std::exp(g20.t[i]);
    CHECK(std::fabs(barycentric_eval(g20, ev, 0.3) - std::exp(0.3)) < 1e-13);
}

TEST_CASE("spectral interpolation error of exp decays geometrically") {
    double prev = 1.0;
    for (int n = 4; n <= 24; n += 4) {
        auto g = cheb_points(n, -1.0, 1.0);
        Vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = std::exp(g.t[i]);
        double worst = 0;
        for (int j = 0; j <= 50; ++j) {
            double t = -1.0 + 0.04 * j;
            worst = std::max(worst, std::fabs(barycentric_eval(g, v, t) - std::exp(t)));
        }
        if (n > 4 && prev > 1e-13) CHECK(worst / prev <= 0.2);
        prev = worst;
    }
}

TEST_CASE("differentiation matrix: polynomial exactness") {
    auto g = cheb_points(5, -1.0, 1.0);
    auto D = diff_matrix(g);
    // rows sum to zero
    for (int i = 0; i < 5; ++i) {
        double s = 0;
        for (int j = 0; j < 5; ++j) s += D(i, j);
        CHECK(std::fabs(s) < 1e-13);
    }
    // x^2 -> 2x exactly
    Vector<double> x2(5);
    for (int i = 0; i < 5; ++i) x2[i] = g.t[i] * g.t[i];
    auto dx2 = D * x2;
    for (int i = 0; i < 5; ++i) CHECK(dx2[i] == doctest::Approx(2 * g.t[i]).epsilon(1e-12));
    // constants -> zero
    Vector<double> c(5);
    for (int i = 0; i < 5; ++i) c[i] = 7.0;
    auto dc = D * c;
    for (int i = 0; i < 5; ++i) CHECK(std::fabs(dc[i]) < 1e-12);
    // D^2 on x^3 -> 6x
    auto g8 = cheb_points(8, -1.0, 1.0);
    auto D8 = diff_matrix(g8);
    Vector<double> x3(8);
    for (int i = 0; i < 8; ++i) x3[i] = std::pow(g8.t[i], 3);
    auto d2x3 = D8 * (D8 * x3);
    for (int i = 0; i < 8; ++i) CHECK(std::fabs(d2x3[i] - 6 * g8.t[i]) < 1e-10);
    // interval mapping: d/dt of t^2 on [0,2]
    auto gm = cheb_points(6, 0.0, 2.0);
    auto Dm = diff_matrix(gm);
    Vector<double> t2(6);
    for (int i = 0; i < 6; ++i) t2[i] = gm.t[i] * gm.t[i];
    auto dt2 = Dm * t2;
    for (int i = 0; i < 6; ++i) CHECK(dt2[i] == doctest::Approx(2 * gm.t[i]).epsilon(1e-12));
}

TEST_CASE("rectangular down-sampling matrices") {
    // s=0, same size: identity
    auto M0 = rect_diff_matrix(7, 7, 0, -1.0, 1.0);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) CHECK(M0(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));

    // M(n-2, n; 2) applied to x^4 samples gives 12 x^2 at Y exactly
    int n = 8;
    auto X = cheb_points(n, -1.0, 1.0);
    auto Y = cheb_points(n - 2, -1.0, 1.0);
    auto M2 = rect_diff_matrix(n - 2, n, 2, -1.0, 1.0);
    Vector<double> x4(n);
    for (int i = 0; i < n; ++i) x4[i] = std::pow(X.t[i], 4);
    auto out = M2 * x4;
    for (int i = 0; i < n - 2; ++i)
        CHECK(out[i] == doctest::Approx(12 * Y.t[i] * Y.t[i]).epsilon(1e-11));

    // resampling row sums are 1 (interpolates constants)
    auto E = rect_diff_matrix(n - 2, n, 0, -1.0, 1.0);
    for (int i = 0; i < n - 2; ++i) {
        double s = 0;
        for (int j = 0; j < n; ++j) s += E(i, j);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    }

    // polynomial exactness across s <= 4, n <= 24
    for (int nn : {12, 24}) {
        for (int s = 1; s <= 4; ++s) {
            auto Xs = cheb_points(nn, -1.0, 1.0);
            auto Ys = cheb_points(nn - s, -1.0, 1.0);
            auto M = rect_diff_matrix(nn - s, nn, s, -1.0, 1.0);
            // monomial t^(s+2): s-th derivative is (s+2)!/2 t^2
            Vector<double> mono(nn);
            for (int i = 0; i < nn; ++i) mono[i] = std::pow(Xs.t[i], s + 2);
            auto d = M * mono;
            double fact = 1;
            for (int q = 0; q < s; ++q) fact *= (s + 2 - q);
            // exact in exact arithmetic; the double floor grows like |D|^s eps
            for (int i = 0; i < nn - s; ++i)
                CHECK(std::fabs(d[i] - fact * Ys.t[i] * Ys.t[i]) < 1e-6);
        }
    }
    CHECK_THROWS_AS(rect_diff_matrix(0, 8, 1, -1.0, 1.0), DomainError);
}

TEST_CASE("assemble_spectral structure for the airy equation") {
    auto L = parse_operator<double>("d^2 - t");
    auto X = cheb_points(16, -1.0, 1.0);
    std::vector<DataPoint<double>> conds{{-1.0, 0.1, 0}, {1.0, 0.2, 0}};
    auto [A, B] = assemble_spectral(L, X, conds);
    REQUIRE(A.rows() == 16);
    // first 14 rows equal M(14,16;2) - diag(Y) M(14,16;0)
    auto M2 = rect_diff_matrix(14, 16, 2, -1.0, 1.0);
    auto M0 = rect_diff_matrix(14, 16, 0, -1.0, 1.0);
    auto Y = cheb_points(14, -1.0, 1.0);
    for (int i = 0; i < 14; ++i)
        for (int j = 0; j < 16; ++j)
            CHECK(A(i, j) == doctest::Approx(M2(i, j) - Y.t[i] * M0(i, j)).epsilon(1e-12));
    // conditions at the endpoints are unit rows at columns 0 and 15
    for (int j = 0; j < 16; ++j) {
        CHECK(A(14, j) == doctest::Approx(j == 0 ? 1.0 : 0.0));
        CHECK(A(15, j) == doctest::Approx(j == 15 ? 1.0 : 0.0));
    }
    CHECK(B[14] == 0.1);
    CHECK(B[15] == 0.2);

    std::vector<DataPoint<double>> wrong{{-1.0, 0.1, 0}};
    CHECK_THROWS_AS(assemble_spectral(L, X, wrong), DomainError);
    std::vector<DataPoint<double>> outside{{-2.0, 0.1, 0}, {1.0, 0.2, 0}};
    CHECK_THROWS_AS(assemble_spectral(L, X, outside), DataPointError);
}

TEST_CASE("derivative condition rows differentiate then evaluate") {
    // solve f'' = 0 with f(0)=1, f'(0)=2 on [0,1]: f = 1 + 2t
    auto L = parse_operator<double>("d^2");
    std::vector<DataPoint<double>> conds{{0.0, 1.0, 0}, {0.0, 2.0, 1}};
    auto sol = solve_spectral(L, 0.0, 1.0, 10, conds);
    for (double t : {0.25, 0.5, 0.9}) CHECK(sol(t) == doctest::Approx(1 + 2 * t).epsilon(1e-10));
}

TEST_CASE("airy BVP on [-20,11] is clean; IVP from -20 diverges") {
    // boundary-value solve at D=30 reproduces Ai to 1e-6 relative wherever
    // |Ai| > 1e-8 on [-20, 9]
    {
        PrecisionScope scope(30);
        using R = BigFloat;
        auto L = parse_operator<R>("d^2 - t");
        std::vector<DataPoint<R>> conds{
            {R(-20), from_string<R>("-0.176406127077984689590192292219"), 0},
            {R(11), from_string<R>("4.22627586496035959129883545080e-12"), 0}};
        auto sol = solve_spectral(L, R(-20), R(11), 360, conds);
        double worst = 0;
        for (double t = -20.0; t <= 9.0; t += 0.25) {
            R ai = airy_ai(R(t));
            if (std::fabs(to_double(ai)) <= 1e-8) continue;
            worst = std::max(worst, std::fabs(to_double((sol(R(t)) - ai) / ai)));
        }
        CHECK(worst < 1e-6);
    }
    // initial-value conditions at -20 blow up for t > 9 in double precision
    {
        auto L = parse_operator<double>("d^2 - t");
        std::vector<DataPoint<double>> conds{{-20.0, -0.176406127077984689590192292219, 0},
                                             {-20.0, 0.892862856736471238398409934114, 1}};
        auto sol = solve_spectral(L, -20.0, 11.0, 360, conds);
        double worst_rel = 0;
        PrecisionScope scope(30);
        for (double t = 9.0; t <= 11.0; t += 0.25) {
            double ai = to_double(airy_ai(BigFloat(t)));
            worst_rel = std::max(worst_rel, std::fabs(sol(t) - ai) / std::fabs(ai));
        }
        CHECK(worst_rel > 1.0);
    }
}

TEST_CASE("spectral operator rows vanish on oracle airy samples") {
    PrecisionScope scope(30);
    double prev = 1e300;
    for (int n : {12, 20, 28}) {
        auto L = parse_operator<double>("d^2 - t");
        auto X = cheb_points(n, -2.0, 1.0);
        std::vector<DataPoint<double>> conds{{-2.0, 0.0, 0}, {1.0, 0.0, 0}};
        auto [A, B] = assemble_spectral(L, X, conds);
        Vector<double> samples(n);
        for (int i = 0; i < n; ++i) samples[i] = to_double(airy_ai(BigFloat(X.t[i])));
        auto r = A * samples;
        double worst = 0;
        for (int i = 0; i < n - 2; ++i) worst = std::max(worst, std::fabs(r[i]));
        CHECK(worst < prev * 0.3);  // spectral decay in n until round-off
        prev = std::max(worst, 1e-14);
    }
}

TEST_CASE("spectral solve equals a zero chebyshev-quadrature loss") {
    // the operator rows vanish at Y, so the chebyshev-weight quadrature loss
    // computed from the spectral solution is zero up to round-off
    auto L = parse_operator<double>("d^2 - t");
    int n = 24;
    std::vector<DataPoint<double>> conds{{-2.0, 0.22740742820168557, 0}, {1.0, 0.13529241631288141, 0}};
    auto sol = solve_spectral(L, -2.0, 1.0, n, conds);
    auto X = sol.grid;
    auto [A, B] = assemble_spectral(L, X, conds);
    auto resid = A * sol.values - B;
    // quadrature over the interior collocation rows
    double loss = 0;
    auto q = QuadratureRule<double>::chebyshev_weight(-2.0, 1.0, n - 2 + 1);
    for (int i = 0; i < n - 2; ++i) loss += std::fabs(resid[i]) * std::fabs(resid[i]);
    CHECK(loss < 1e-20);

    // and the solution interpolates the true airy function closely
    PrecisionScope scope(30);
    for (double t : {-1.5, -0.5, 0.5}) {
        CHECK(std::fabs(sol(t) - to_double(airy_ai(BigFloat(t)))) < 1e-9);
    }
}

TEST_CASE("hkn spectral BVP with noisy boundary data stays in a band") {
    // values + derivatives at both ends of [1e4, 1e4+40], 30 perturbed trials
    PrecisionScope scope(30);
    auto L = hkn_operator<double>(10, 1, 1.0);
    double a = 1e4, b = 1e4 + 40;
    auto H = [&](double y, int d) {
        auto v = hkn_with_derivatives(10, 1, BigFloat(1), BigFloat(y), 1, 1e-16);
        return to_double(v[static_cast<std::size_t>(d)]);
    };
    double Ha = H(a, 0), Hpa = H(a, 1), Hb = H(b, 0), Hpb = H(b, 1);
    std::vector<DataPoint<double>> conds{{a, Ha, 0}, {a, Hpa, 1}, {b, Hb, 0}, {b, Hpb, 1}};
    auto base = solve_spectral(L, a, b, 48, conds);
    SplitMix64 rng(21);
    double worst = 0;
    for (int trial = 0; trial < 30; ++trial) {
        auto noisy = conds;
        for (auto& c : noisy) c.q *= 1 + 1e-3 * (2 * rng.uniform01() - 1);
        auto sol = solve_spectral(L, a, b, 48, noisy);
        for (int i = 0; i <= 40; ++i) {
            double y = a + i;
            double rel = std::fabs(sol(y) - base(y)) / std::fabs(base(y));
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst < 5e-2);
}
