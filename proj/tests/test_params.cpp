#include <doctest.h>

#include <random>

#include "dche/params.hpp"
#include "support.hpp"

using dche::complex;
using dche::DcheParams;
using dche::JaffeLayParams;
using dche::NormalFormParams;

TEST_CASE("from_normal_form shifts only A_0") {
    NormalFormParams b;
    b.b(-2) = 1.0;
    b.b(2) = 1.0;
    const DcheParams a = dche::from_normal_form(b);
    CHECK(a.a(-2) == complex(1.0, 0.0));
    CHECK(a.a(-1) == complex(0.0, 0.0));
    CHECK(a.a(0) == complex(0.25, 0.0));
    CHECK(a.a(1) == complex(0.0, 0.0));
    CHECK(a.a(2) == complex(1.0, 0.0));
}

TEST_CASE("from_normal_form inverts the benchmark parameter set") {
    NormalFormParams b;
    b.b(-2) = -1.0;
    b.b(-1) = 0.8;
    b.b(0) = 31.0 / 25.0 - 0.25;
    b.b(1) = 0.6;
    b.b(2) = -0.25;
    const DcheParams a = dche::from_normal_form(b);
    CHECK(std::abs(a.a(0) - complex(1.24, 0.0)) < 1e-16);
    CHECK(a.a(-2) == complex(-1.0, 0.0));
    CHECK(a.a(2) == complex(-0.25, 0.0));
}

TEST_CASE("from_normal_form rejects a vanishing B_2") {
    NormalFormParams b;
    b.b(-2) = 1.0; // B_2 stays zero
    CHECK_THROWS_AS((void)dche::from_normal_form(b), dche::DegenerateEquation);
}

TEST_CASE("normal form round trip") {
    std::mt19937 rng(4201);
    for (int i = 0; i < 30; ++i) {
        const DcheParams a = testsupport::random_params(rng);
        const DcheParams back = dche::from_normal_form(dche::to_normal_form(a));
        for (int p = -2; p <= 2; ++p) {
            if (p == 0) // A_0 passes through -1/4 + 1/4: exact up to one rounding
                CHECK(std::abs(back.a(p) - a.a(p)) <= 1e-15 * (1.0 + std::abs(a.a(p))));
            else
                CHECK(std::abs(back.a(p) - a.a(p)) == 0.0);
        }
    }
}

TEST_CASE("from_jaffe_lay published example") {
    const DcheParams a = dche::from_jaffe_lay({4.0, -3.0, 2.0, -1.0});
    CHECK(std::abs(a.a(-2) - complex(-0.25, 0.0)) < 1e-16);
    CHECK(std::abs(a.a(-1) - complex(0.375, 0.0)) < 1e-16);
    CHECK(std::abs(a.a(0) - complex(-0.5, 0.0)) < 1e-16);
    CHECK(std::abs(a.a(1) - complex(0.125, 0.0)) < 1e-16);
    CHECK(std::abs(a.a(2) - complex(-0.25, 0.0)) < 1e-16);
}

TEST_CASE("from_jaffe_lay rejects alpha = 0 and handles alpha = 8") {
    CHECK_THROWS_AS((void)dche::from_jaffe_lay({0.0, 1.0, 1.0, 1.0}), dche::DegenerateEquation);
    const DcheParams a = dche::from_jaffe_lay({8.0, 0.0, 0.0, 0.0});
    CHECK(std::abs(a.a(-2) + 1.0) < 1e-16);
    CHECK(std::abs(a.a(2) + 1.0) < 1e-16);
    CHECK(std::abs(a.a(-1)) == 0.0);
    CHECK(std::abs(a.a(1)) == 0.0);
    CHECK(std::abs(a.a(0) - complex(-1.75, 0.0)) < 1e-16);
}

TEST_CASE("from_jaffe_lay yields A_2 = A_-2 on random draws") {
    std::mt19937 rng(4202);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 40; ++i) {
        JaffeLayParams j{complex(u(rng), u(rng)), complex(u(rng), u(rng)),
                         complex(u(rng), u(rng)), complex(u(rng), u(rng))};
        if (std::abs(j.alpha) < 0.1) continue;
        const DcheParams a = dche::from_jaffe_lay(j);
        CHECK(a.a(2) == a.a(-2));
    }
}

TEST_CASE("jaffe_lay_point_map fixed point and algebraic values") {
    const JaffeLayParams j{4.0, -3.0, 2.0, -1.0};
    {
        const auto [z, pref] = dche::jaffe_lay_point_map(complex(0.0, 0.0), j);
        CHECK(std::abs(z - 1.0) == 0.0);
        CHECK(std::abs(pref - 1.0) < 1e-15);
    }
    {
        const auto [z, pref] = dche::jaffe_lay_point_map(complex(1.0 / 3.0, 0.0), j);
        CHECK(std::abs(z - 2.0) < 1e-15);
        (void)pref;
    }
    {
        const auto [z, pref] = dche::jaffe_lay_point_map(complex(0.5, 0.0), j);
        CHECK(std::abs(z - 3.0) < 1e-15);
        const double expected = std::exp((3.0 - 1.0 / 3.0) / 2.0) / std::sqrt(3.0);
        CHECK(std::abs(pref - expected) < 1e-14 * expected);
    }
    CHECK_THROWS_AS((void)dche::jaffe_lay_point_map(complex(1.0, 0.0), j), dche::MapSingularity);
    CHECK_THROWS_AS((void)dche::jaffe_lay_point_map(complex(-1.0, 0.0), j), dche::MapSingularity);
}

TEST_CASE("jaffe_lay_point_map composes with the forward map") {
    const JaffeLayParams j{2.0, 1.0, 0.5, -0.25};
    std::mt19937 rng(4203);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int i = 0; i < 40; ++i) {
        const complex t(u(rng), u(rng) * 0.3);
        if (std::abs(t) >= 1.0) continue;
        const auto [z, pref] = dche::jaffe_lay_point_map(t, j);
        (void)pref;
        const complex back = (z - 1.0) / (z + 1.0);
        CHECK(std::abs(back - t) <= 1e-14);
    }
}

TEST_CASE("from_radial maps potential strengths straight through") {
    dche::RadialProblem r;
    r.l = 0;
    r.v = {complex(-1.0, 0.0), complex(0.8, 0.0), complex(1.24, 0.0), complex(0.6, 0.0)};
    r.energy = complex(-0.25, 0.0);
    const DcheParams a = dche::from_radial(r);
    CHECK(a.a(-2) == complex(-1.0, 0.0));
    CHECK(a.a(-1) == complex(0.8, 0.0));
    CHECK(a.a(0) == complex(1.24, 0.0));
    CHECK(a.a(1) == complex(0.6, 0.0));
    CHECK(a.a(2) == complex(-0.25, 0.0));

    r.l = 1; // the centrifugal term cancels, A_0 is unchanged
    CHECK(dche::from_radial(r).a(0) == complex(1.24, 0.0));

    r.v = {};
    r.energy = complex(-1.0, 0.0);
    CHECK_THROWS_AS((void)dche::from_radial(r), dche::DegenerateEquation);
}

TEST_CASE("validate accepts the benchmark set and rejects degenerate ones") {
    DcheParams a;
    a.a(-2) = -1.0;
    a.a(-1) = 0.8;
    a.a(0) = 1.24;
    a.a(1) = 0.6;
    a.a(2) = -0.25;
    CHECK_NOTHROW((void)dche::validate(a));
    DcheParams b = a;
    b.a(2) = 0.0;
    CHECK_THROWS_AS((void)dche::validate(b), dche::DegenerateEquation);
    DcheParams c = a;
    c.a(-2) = 0.0;
    CHECK_THROWS_AS((void)dche::validate(c), dche::DegenerateEquation);
}

TEST_CASE("params JSON round trip") {
    std::mt19937 rng(4204);
    const DcheParams a = testsupport::random_params(rng);
    const DcheParams b = dche::params_from_json(dche::params_to_json(a));
    for (int p = -2; p <= 2; ++p) CHECK(std::abs(b.a(p) - a.a(p)) == 0.0);
    CHECK_THROWS_AS((void)dche::params_from_json("{\"A\": [[1,0]]}"), dche::Error);
}
