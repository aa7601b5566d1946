#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "hgm/operator_model.hpp"
#include "hgm/reference.hpp"
#include "hgm/steppers.hpp"
#include "test_util.hpp"

using namespace hgm;
using hgm::test::SplitMix64;

TEST_CASE("parse the Airy operator") {
    auto L = parse_operator<double>("d^2 - t");
    CHECK(L.rank == 2);
    CHECK(L.coeffs[2].eval(5.0) == 1.0);
    CHECK(L.coeffs[1].is_literal_zero());
    CHECK(L.coeffs[0].eval(3.0) == -3.0);
}

TEST_CASE("parse the expanded (d-1)(d^2-t) operator") {
    auto L = parse_operator<double>("d^3 - d^2 - t*d + t - 1");
    CHECK(L.rank == 3);
    double y = 1.7;
    CHECK(L.coeffs[3].eval(y) == 1.0);
    CHECK(L.coeffs[2].eval(y) == -1.0);
    CHECK(L.coeffs[1].eval(y) == doctest::Approx(-y));
    CHECK(L.coeffs[0].eval(y) == doctest::Approx(y - 1));
}

TEST_CASE("zero leading coefficient is a parse error") {
    CHECK_THROWS_AS(parse_operator<double>("0*d^1 + 1"), ParseError);
}

TEST_CASE("parser rejects d misuse and unknown identifiers") {
    CHECK_THROWS_AS(parse_operator<double>("d*t"), ParseError);          // right-multiplied coefficient
    CHECK_THROWS_AS(parse_operator<double>("(d - 1)*(d^2 - t)"), ParseError);  // operator product
    CHECK_THROWS_AS(parse_operator<double>("q*d"), ParseError);          // unbound identifier
    CHECK_THROWS_AS(parse_operator<double>("exp(d)"), ParseError);
    // right-multiplication by a bare d power is composition and is fine
    auto L = parse_operator<double>("(t*d^2 + 1)*d");
    CHECK(L.rank == 3);
    CHECK(L.coeffs[3].eval(2.0) == 2.0);
    CHECK(L.coeffs[1].eval(2.0) == 1.0);
}

TEST_CASE("parse errors carry line and column") {
    try {
        parse_operator<double>("d^2 - &t");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(e.column == 7);
    }
}

TEST_CASE_TEMPLATE("serialize/parse round-trip is structurally stable", R, double, BigFloat) {
    PrecisionScope scope(std::is_same_v<R, double> ? 16 : 30);
    std::map<std::string, R> params{{"k", R(10)}, {"n", R(1)}, {"x", R(1)}};
    for (const std::string text :
         {std::string("d^2 - t"), std::string("d^3 - d^2 - t*d + t - 1"),
          std::string("t^2*d^4 + (2*n + 2 - t)*t*d^3 + (n*(n+1) - (x + k + n + 3)*t)*d^2 + ((t - n)*x "
                      "- n*(k+2))*d + (k+1)*x")}) {
        auto L = parse_operator<R>(text, params);
        auto L2 = parse_operator<R>(serialize(L), params);
        REQUIRE(L2.rank == L.rank);
        for (int k = 0; k <= L.rank; ++k) CHECK(structurally_equal(L.coeffs[k], L2.coeffs[k]));
    }
}

TEST_CASE("companion system of the Airy operator") {
    auto L = parse_operator<double>("d^2 - t");
    auto S = companion_system(L);
    auto P = S.P(4.0);
    CHECK(P(0, 0) == 0.0);
    CHECK(P(0, 1) == 1.0);
    CHECK(P(1, 0) == 4.0);
    CHECK(P(1, 1) == 0.0);

    auto L1 = parse_operator<double>("d - 1");
    auto S1 = companion_system(L1);
    CHECK(S1.P(0.3)(0, 0) == 1.0);
}

TEST_CASE("companion hits singular points of the leading coefficient") {
    auto L = parse_operator<double>("t*d - 1");
    auto S = companion_system(L);
    CHECK_THROWS_AS(S.P(0.0), SingularPointError);
}

TEST_CASE("gauged H^k_n system matches the closed-form matrix") {
    int k = 10, n = 1;
    auto S = hkn_gauged_system<double>(k, n, 1.0);
    auto P = S.P(10.0);
    for (int i = 0; i < 3; ++i) CHECK(P(i, i) == doctest::Approx((-10.0 - k + n - 1) / 10.0));
    CHECK(P(3, 3) == doctest::Approx((-k - n - 3) / 10.0));
    for (int i = 0; i < 3; ++i) CHECK(P(i, i + 1) == doctest::Approx(1.0));
    double y = 10.0, x = 1.0;
    CHECK(P(3, 0) == doctest::Approx((-k - 1) * x / (y * y)));
    CHECK(P(3, 1) == doctest::Approx(((-y + n) * x + n * k + 2.0 * n) / (y * y)));
    CHECK(P(3, 2) == doctest::Approx((y * x + (k + n + 3) * y - double(n) * n - n) / (y * y)));

    SplitMix64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        double yy = rng.uniform(0.5, 50.0);
        auto Pt = S.P(yy);
        CHECK(std::fabs(Pt(0, 0) - (-yy - k + n - 1) / yy) < 1e-12);
        CHECK(std::fabs(Pt(3, 0) - (-k - 1) * x / (yy * yy)) < 1e-12);
    }
}

TEST_CASE("gauge transform is an involution and respects propagation") {
    auto L = parse_operator<double>("d^2 - t");
    auto S = companion_system(L);
    auto G = gauge_transform(S, 1.0, 0.5);
    auto back = gauge_transform(G, -1.0, -0.5);
    for (double t : {0.5, 1.0, 2.5}) {
        auto P0 = S.P(t), P1 = back.P(t);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(P1(i, j) == doctest::Approx(P0(i, j)).epsilon(1e-14));
    }

    // dual propagation: g^-1 F solves the alpha=1 transformed system
    auto Gt = gauge_transform(S, 1.0, 0.0);
    Grid<double> grid(1.0, 1e-3, 1000);
    Vector<double> F0{0.3, -0.2};
    auto FT = solve_ivp(StepperKind::rk4(), S, F0, grid);
    Vector<double> G0{0.3 / std::exp(1.0), -0.2 / std::exp(1.0)};
    auto GT = solve_ivp(StepperKind::rk4(), Gt, G0, grid);
    for (long i : {250L, 500L, 1000L}) {
        double g = std::exp(grid.node(i));
        CHECK(std::fabs(FT.at(i)[0] / g - GT.at(i)[0]) < 1e-8);
        CHECK(std::fabs(FT.at(i)[1] / g - GT.at(i)[1]) < 1e-8);
    }

    // gauge with beta != 0 is singular at t = 0
    auto Gb = gauge_transform(S, 0.0, 1.0);
    CHECK_THROWS_AS(Gb.P(0.0), SingularPointError);
    CHECK(Gb.singular_points.size() == 1);
}

TEST_CASE("apply_operator examples") {
    auto L = parse_operator<double>("d^2 - t");
    // (t^3)'' - t*t^3 at t=2: 12 - 16 = -4
    Jet<double> t = Jet<double>::variable(3, 2.0);
    Jet<double> t3 = jet_pow_int(t, 3);
    CHECK(apply_operator(L, t3.truncated(2), 2.0) == doctest::Approx(-4.0));

    Jet<double> zero(2);
    CHECK(apply_operator(L, zero, 1.5) == 0.0);

    CHECK_THROWS_AS(apply_operator(L, Jet<double>(1), 1.0), DomainError);

    // true Airy function, second derivative from an extended-precision difference
    for (double tt : {-3.0, -1.0, 0.5, 2.0}) {
        auto v = airy(tt);
        Jet<double> aj(2);
        aj[0] = v.ai;
        aj[1] = v.ai_prime;
        PrecisionScope scope(40);
        BigFloat h(1e-8), tb(tt);
        BigFloat second = (airy(tb + h).ai - 2 * airy(tb).ai + airy(tb - h).ai) / (h * h);
        aj[2] = second.to_double();
        CHECK(std::fabs(apply_operator(L, aj, tt)) < 1e-7);
    }
}

TEST_CASE("companion scalar residual equals (Lf-b)/c_r in the last row") {
    std::map<std::string, double> none;
    auto L = parse_operator<double>("(t + 2)*d^3 + t*d^2 - d + 2", none, "t");
    auto S = companion_system(L);
    REQUIRE(!S.homogeneous());
    for (double t : {0.1, 0.9, 1.7}) {
        Jet<double> f = jet_exp(0.5 * Jet<double>::variable(4, t));
        Vector<double> F{f[0], f[1], f[2]};
        Vector<double> Fp{f[1], f[2], f[3]};
        Vector<double> resid = Fp - S.P(t) * F - S.B(t);
        double lead = t + 2.0;
        double expected = (apply_operator(L, f.truncated(3), t) - t) / lead;
        CHECK(std::fabs(resid[0]) < 1e-12);
        CHECK(std::fabs(resid[1]) < 1e-12);
        CHECK(resid[2] == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("grid nodes are derived, never accumulated") {
    Grid<double> g(0.0, 1e-3, 10000);
    CHECK(g.node(10000) == 0.0 + 10000 * 1e-3);
    CHECK(g.t_end() == g.node(g.N));
    Grid<BigFloat> gb(BigFloat(0), BigFloat(1e-3), 10000);
    CHECK((gb.node(10000) - BigFloat(10)).to_double() == doctest::Approx(0.0));
    CHECK_THROWS_AS(Grid<double>(0.0, -1.0, 5), DomainError);
}

TEST_CASE("expr jets match finite differences on a random corpus") {
    SplitMix64 rng(99);
    auto rand_expr = [&](auto&& self, int depth) -> std::string {
        int pick = static_cast<int>(rng.next() % (depth > 2 ? 3 : 7));
        char buf[64];
        switch (pick) {
            case 0:
                std::snprintf(buf, sizeof buf, "%.3f", rng.uniform(0.2, 3.0));
                return buf;
            case 1: return "t";
            case 2:
                std::snprintf(buf, sizeof buf, "(t + %.3f)", rng.uniform(0.1, 2.0));
                return buf;
            case 3: return "(" + self(self, depth + 1) + " + " + self(self, depth + 1) + ")";
            case 4: return "(" + self(self, depth + 1) + "*" + self(self, depth + 1) + ")";
            case 5: return "exp((" + self(self, depth + 1) + ")/4)";
            default: return "sqrt((" + self(self, depth + 1) + ")^2 + 1)";
        }
    };
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::string text = "(" + rand_expr(rand_expr, 0) + ") + log(t + 4)/(t + 2)";
        auto e = parse_expr<double>(text);
        double t0 = rng.uniform(0.5, 2.5);
        auto jet = e.eval_jet(t0, 2);
        double h = 1e-6 * std::max(1.0, std::fabs(t0));
        double f0 = e.eval(t0), fp = e.eval(t0 + h), fm = e.eval(t0 - h);
        double d1 = (fp - fm) / (2 * h);
        CHECK(std::fabs(jet[0] - f0) == 0.0);
        CHECK(std::fabs(jet[1] - d1) <= 1e-6 * std::max(1.0, std::fabs(d1)));
        // second derivative against an extended-precision difference oracle
        PrecisionScope scope(40);
        auto eb = parse_expr<BigFloat>(text);
        BigFloat hb(1e-6), tb(t0);
        BigFloat d2 = (eb.eval(tb + hb) - 2 * eb.eval(tb) + eb.eval(tb - hb)) / (hb * hb);
        CHECK(std::fabs(jet[2] - d2.to_double()) <= 1e-6 * std::max(1.0, std::fabs(d2.to_double())));
        ++checked;
    }
    CHECK(checked == 50);
}
