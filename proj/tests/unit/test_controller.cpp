#include <doctest.h>

#include <seiar/controller.hpp>
#include <seiar/errors.hpp>
#include <seiar/model.hpp>

#include <cmath>
#include <random>

using namespace seiar;
using namespace seiar::controller;

namespace {

const SeiarState kZHat0(11000, 800, 1000, 700, 2500);

DesiredTrajectory zero_traj()
{
    DesiredTrajectory t;
    t.law = TrajectoryLaw::ConstantZero;
    return t;
}

} // namespace

TEST_CASE("drift of the tracked compartments")
{
    const ModelParams th = table_params(model::default_beta());
    CHECK(y_hat(SeiarState(), th).isZero(0.0));
    const Vec2 y = y_hat(kZHat0, th);
    CHECK(y[1] == doctest::Approx(36.6736).epsilon(1e-12));
    CHECK(y[0] == doctest::Approx(-th.beta * (0.5 * 11000 * 1000 + 11000 * 700)));
}

TEST_CASE("desired trajectory")
{
    DesiredTrajectory t;
    t.z0 = Vec2(11000, 1000);
    CHECK(t.value(0.0) == t.z0);
    CHECK(t.value(10.0).isApprox(t.z0 * std::exp(-3.0)));
    CHECK(t.rate(2.0).isApprox(-0.3 * t.value(2.0)));
    const DesiredTrajectory z = zero_traj();
    CHECK(z.value(3.0).isZero(0.0));
    CHECK(z.rate(3.0).isZero(0.0));
}

TEST_CASE("clf terms match reference values")
{
    // tools/oracle.py
    const ModelParams th = table_params(model::default_beta());
    const ClfTerms k = clf_terms(kZHat0, th, zero_traj(), 0.0, ClfConfig());
    CHECK(k.y_hat[0] == doctest::Approx(-543.64591147786947).epsilon(1e-12));
    CHECK(k.y_hat[1] == doctest::Approx(36.6736).epsilon(1e-12));
    CHECK(k.V == doctest::Approx(61000000.0).epsilon(1e-14));
    CHECK(k.LfV == doctest::Approx(-5943431.4262565641).epsilon(1e-12));
    CHECK(k.LgV[0] == doctest::Approx(-121000000.0).epsilon(1e-14));
    CHECK(k.LgV[1] == doctest::Approx(-1000000.0).epsilon(1e-14));
    CHECK(k.phi0 == doctest::Approx(55056568.573743436).epsilon(1e-12));
    CHECK(k.phi0_rob == doctest::Approx(55078659.29577781).epsilon(1e-12));
    CHECK(k.phi1 == k.LgV);
    CHECK(k.e == Vec2(11000, 1000));
}

TEST_CASE("clf terms edge cases")
{
    const ModelParams th = table_params(model::default_beta());
    DesiredTrajectory t;
    t.z0 = Vec2(kZHat0.s(), kZHat0.i());
    const ClfTerms at_ref = clf_terms(kZHat0, th, t, 0.0, ClfConfig());
    CHECK(at_ref.V == 0.0);
    CHECK(at_ref.phi0 == 0.0);
    CHECK(at_ref.phi0_rob == 0.0);
    CHECK(at_ref.phi1.isZero(0.0));

    ClfConfig no_robust;
    no_robust.k_r = 0.0;
    const ClfTerms k0 = clf_terms(kZHat0, th, zero_traj(), 0.0, no_robust);
    CHECK(k0.phi0_rob == k0.phi0);

    double prev = -1e300;
    for (double kr : {0.0, 0.5, 1.0, 2.0, 5.0}) {
        ClfConfig cfg;
        cfg.k_r = kr;
        const double rob = clf_terms(kZHat0, th, zero_traj(), 0.0, cfg).phi0_rob;
        CHECK(rob >= prev);
        prev = rob;
    }
}

TEST_CASE("pointwise min-norm control")
{
    ClfTerms k;
    k.phi0_rob = -1.0;
    k.phi1 = Vec2(3.0, 4.0);
    CHECK(pwmc(k) == ControlInput{});

    k.phi0_rob = 1.0;
    k.phi1 = Vec2(1.0, 0.0);
    k.e = Vec2(1.0, 0.0);
    const ControlInput u = pwmc(k);
    CHECK(u.u1 == -1.0);
    CHECK(u.u2 == 0.0);

    k.phi1 = Vec2(1e-9, 0.0);
    CHECK_THROWS_AS(pwmc(k), DegenerateDirection);

    // the robust constraint holds with equality
    const ModelParams th = table_params(model::default_beta());
    const ClfTerms n = clf_terms(kZHat0, th, zero_traj(), 0.0, ClfConfig());
    const ControlInput v = pwmc(n);
    CHECK(std::abs(n.phi0_rob + n.phi1.dot(v.vec())) <= 1e-9 * n.phi0_rob);
}

TEST_CASE("qp assembly")
{
    ClfTerms k;
    k.z_e_hat = Vec2(1.0, 1.0);
    ClfConfig cfg;
    const qp::QpProblem p = assemble_qp(k, zero_traj(), 0.0, cfg);
    REQUIRE(p.n == 3);
    CHECK(p.H.diagonal() == Eigen::Vector3d(20.0, 2.0, 2.0));
    REQUIRE(p.rows.size() == 5);
    CHECK(p.rows[0].a == Eigen::Vector3d(-1.0, 0.0, 0.0));
    const Eigen::Vector4d b2(p.rows[1].b, p.rows[2].b, -p.rows[3].b, -p.rows[4].b);
    CHECK(b2 == Eigen::Vector4d(1.0, 1.0, 0.0, 0.0));

    ClfTerms tiny;
    tiny.z_e_hat = Vec2(0.0, 0.0);
    const qp::QpProblem g = assemble_qp(tiny, zero_traj(), 0.0, cfg);
    CHECK(g.H(1, 1) > 0.0);
    CHECK(g.H(2, 2) > 0.0);
}

TEST_CASE("qp cost is the squared virtual input")
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> pop(1.0, 16000.0), unit(-1.0, 2.0);
    const ModelParams th = table_params(model::default_beta());
    DesiredTrajectory t;
    t.z0 = Vec2(9000, 800);
    ClfConfig cfg;
    for (int k = 0; k < 100; ++k) {
        const SeiarState z(pop(gen), pop(gen), pop(gen), pop(gen), pop(gen));
        const double time = unit(gen) + 1.0;
        const ClfTerms terms = clf_terms(z, th, t, time, cfg);
        const qp::QpProblem p = assemble_qp(terms, t, time, cfg);
        const Vec2 dzd = t.rate(time);
        const Vec2 c0 = terms.y_hat - dzd; // mu at u = 0
        const double offset = c0.squaredNorm();
        for (int j = 0; j < 3; ++j) {
            const ControlInput u{unit(gen), unit(gen)};
            Eigen::Vector3d x(0.0, u.u1, u.u2);
            const double mu2 = virtual_input(terms, dzd, u).squaredNorm();
            CHECK(p.objective(x) + offset == doctest::Approx(mu2).epsilon(1e-9));
        }
    }
}

TEST_CASE("qp without binding bounds is the min-norm law on the virtual input")
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> pop(100.0, 16000.0);
    const ModelParams th = table_params(model::default_beta());
    DesiredTrajectory t;
    t.z0 = Vec2(8000, 600);
    ClfConfig cfg;
    cfg.u_min = Vec2::Constant(-1e3);
    cfg.u_max = Vec2::Constant(1e3);
    int checked = 0;
    while (checked < 100) {
        const SeiarState z(pop(gen), pop(gen), pop(gen), pop(gen), pop(gen));
        const ClfTerms terms = clf_terms(z, th, t, 1.0, cfg);
        if (terms.phi0_rob <= 0.0)
            continue;
        const auto sol = qp::solve(assemble_qp(terms, t, 1.0, cfg));
        REQUIRE(sol.status == qp::QpStatus::Optimal);
        // e'mu + g <= h with g = lambda V + k_r |e|
        const double ne2 = terms.e.squaredNorm();
        const double g = cfg.lambda * terms.V + cfg.k_r * std::sqrt(ne2);
        const Vec2 mu = -(cfg.c * g / (1.0 + cfg.c * ne2)) * terms.e;
        const Vec2 u = (terms.y_hat - t.rate(1.0) - mu).cwiseQuotient(terms.z_e_hat);
        CHECK(sol.x[0] == doctest::Approx(g / (1.0 + cfg.c * ne2)).epsilon(1e-7));
        CHECK(sol.x[1] == doctest::Approx(u[0]).epsilon(1e-7));
        CHECK(sol.x[2] == doctest::Approx(u[1]).epsilon(1e-7));
        ++checked;
    }
}
