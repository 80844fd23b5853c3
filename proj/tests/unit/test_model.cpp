#include <doctest.h>

#include <seiar/errors.hpp>
#include <seiar/model.hpp>

#include <cmath>
#include <random>

using namespace seiar;

namespace {

const SeiarState kZ0(15000, 200, 500, 300, 0);

ModelParams random_params(std::mt19937_64& g)
{
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> rate(0.05, 1.5);
    ModelParams th;
    th.beta = std::uniform_real_distribution<double>(1e-6, 1e-4)(g);
    th.epsilon = u01(g);
    th.q = u01(g);
    th.delta = u01(g);
    th.kappa = rate(g);
    th.p = u01(g);
    th.alpha = rate(g);
    th.eta = rate(g);
    th.zeta = u01(g);
    return th;
}

SeiarState random_state(std::mt19937_64& g)
{
    std::uniform_real_distribution<double> pop(0.0, 16000.0);
    return SeiarState(pop(g), pop(g), pop(g), pop(g), pop(g));
}

} // namespace

TEST_CASE("zero state is an equilibrium")
{
    const Vec5 dz = model::dynamics(SeiarState(), {}, table_params(5e-5));
    CHECK(dz.isZero(0.0));
}

TEST_CASE("dynamics match reference values")
{
    // tools/oracle.py, beta = 5e-5
    const ModelParams th = table_params(5e-5);
    Vec5 dz = model::dynamics(kZ0, {}, th);
    CHECK(dz[0] == doctest::Approx(-412.5).epsilon(1e-12));
    CHECK(dz[1] == doctest::Approx(307.3).epsilon(1e-12));
    CHECK(dz[2] == doctest::Approx(-51.8316).epsilon(1e-12));
    CHECK(dz[3] == doctest::Approx(-38.1684).epsilon(1e-12));
    CHECK(dz[4] == doctest::Approx(192.76).epsilon(1e-12));

    dz = model::dynamics(kZ0, {0.3, 0.4}, th);
    CHECK(dz[0] == doctest::Approx(-4912.5).epsilon(1e-12));
    CHECK(dz[2] == doctest::Approx(-251.8316).epsilon(1e-12));
    CHECK(dz[4] == doctest::Approx(4892.76).epsilon(1e-12));
}

TEST_CASE("total population changes only through fatalities")
{
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const ModelParams th = random_params(g);
        const SeiarState z = random_state(g);
        const Vec5 dz = model::dynamics(z, {u01(g), u01(g)}, th);
        const double loss = th.alpha * (1.0 - th.zeta) * z.i();
        CHECK(std::abs(dz.sum() + loss) <= 1e-9 * (1.0 + std::abs(loss)));
    }
    SeiarState no_i = kZ0;
    no_i.z[2] = 0.0;
    CHECK(std::abs(model::dynamics(no_i, {0.5, 0.5}, table_params(5e-5)).sum()) < 1e-9);
}

TEST_CASE("state jacobian agrees with central differences")
{
    std::mt19937_64 g(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const ModelParams th = random_params(g);
        const SeiarState z = random_state(g);
        const ControlInput u{u01(g), u01(g)};
        const Mat5 A = model::state_jacobian(z, u, th);
        for (int j = 0; j < 5; ++j) {
            const double step = 1e-4 * (1.0 + std::abs(z.z[j]));
            SeiarState hi = z, lo = z;
            hi.z[j] += step;
            lo.z[j] -= step;
            const Vec5 fd = (model::dynamics(hi, u, th) - model::dynamics(lo, u, th)) / (2.0 * step);
            CHECK((fd - A.col(j)).norm() <= 1e-7 * (1.0 + A.col(j).norm()));
        }
    }
}

TEST_CASE("jacobian at the origin keeps only linear rates")
{
    const ModelParams th = table_params(5e-5);
    const Mat5 A = model::state_jacobian(SeiarState(), {}, th);
    CHECK(A(1, 1) == doctest::Approx(-th.kappa));
    CHECK(A(2, 2) == doctest::Approx(-th.alpha));
    CHECK(A(3, 3) == doctest::Approx(-th.eta));
    CHECK(A(0, 2) == 0.0);
    CHECK(A(1, 3) == 0.0);
}

TEST_CASE("measurement selects E and I")
{
    CHECK(model::measurement(kZ0) == Vec2(200, 500));
    CHECK(model::measurement(SeiarState()).isZero(0.0));
    const Mat25 C = model::measurement_jacobian();
    CHECK(C * kZ0.z == Vec2(200, 500));
}

TEST_CASE("rk4 step")
{
    const ModelParams th = table_params(model::default_beta());

    SUBCASE("zero stays zero")
    {
        const auto r = model::rk4_step(SeiarState(), {}, th, Vec5::Zero(), 0.01);
        CHECK(r.z.z.isZero(0.0));
        CHECK(r.clamp_events == 0);
    }

    SUBCASE("fourth order self convergence")
    {
        auto integrate = [&](double dt) {
            SeiarState z = kZ0;
            const int n = static_cast<int>(std::lround(1.0 / dt));
            for (int k = 0; k < n; ++k)
                z = model::rk4_step(z, {0.2, 0.1}, th, Vec5::Zero(), dt).z;
            return z.z;
        };
        const Vec5 a = integrate(0.1), b = integrate(0.05), c = integrate(0.025);
        const double ratio = (a - b).norm() / (b - c).norm();
        CHECK(ratio == doctest::Approx(16.0).epsilon(0.1));
    }

    SUBCASE("noise-free trajectories stay nonnegative without clamping")
    {
        SeiarState z = kZ0;
        int clamps = 0;
        for (int k = 0; k < 4000; ++k) {
            const auto r = model::rk4_step(z, {1.0, 1.0}, th, Vec5::Zero(), 0.01);
            z = r.z;
            clamps += r.clamp_events;
        }
        CHECK(clamps == 0);
        CHECK(z.z.minCoeff() >= 0.0);
    }

    SUBCASE("negative excursions are clamped and counted")
    {
        Vec5 w = Vec5::Zero();
        w[1] = -1e6;
        const auto r = model::rk4_step(kZ0, {}, th, w, 0.01);
        CHECK(r.z.e() == 0.0);
        CHECK(r.clamp_events == 1);
    }

    SUBCASE("non-finite input throws")
    {
        SeiarState bad = kZ0;
        bad.z[0] = std::nan("");
        CHECK_THROWS_AS(model::rk4_step(bad, {}, th, Vec5::Zero(), 0.01), NonFinite);
    }
}

TEST_CASE("transmission rate calibration")
{
    // tools/oracle.py
    CHECK(model::default_beta() == doctest::Approx(4.118529632408102e-5).epsilon(1e-12));
    CHECK(model::basic_reproduction_number(table_params(5e-5), 16000)
          == doctest::Approx(2.1852459016393437).epsilon(1e-12));
    const ModelParams th = table_params(0.0);
    const double b = model::calibrate_beta(th, 10000, 2.5);
    CHECK(model::basic_reproduction_number(table_params(b), 10000) == doctest::Approx(2.5));
}

TEST_CASE("parameter validation and scaling")
{
    ModelParams th = table_params(5e-5);
    CHECK_NOTHROW(th.validate());
    th.q = 1.2;
    CHECK_THROWS_AS(th.validate(), ValidationError);

    const ModelParams up = table_params(5e-5).scaled(1.5);
    CHECK(up.kappa == doctest::Approx(0.789));
    CHECK(up.p == 1.0);
    CHECK(up.zeta == 1.0);
    const ModelParams down = table_params(5e-5).scaled(0.5);
    CHECK(down.beta == doctest::Approx(2.5e-5));
    CHECK(down.q == doctest::Approx(0.25));
}
