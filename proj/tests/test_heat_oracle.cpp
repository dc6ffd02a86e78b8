#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlc/diagnostics.hpp"
#include "nlc/heat_oracle.hpp"
#include "nlc/initial_data.hpp"
#include "nlc/spectral.hpp"
#include "oracle_helpers.hpp"

using namespace nlc;
using namespace nlc::testing;

namespace {
const Grid g32(32, 2.0 * M_PI);
}

TEST_CASE("exact_heat: identity at t=0, e^{-1} on a unit mode, rejection") {
    ScalarField f = sample(g32, [](double x, double, double) { return std::sin(x); });
    ScalarField h0 = exact_heat(f, 0.0);
    ScalarField fs = transform(f, Basis::Spectral);
    CHECK((h0.modes() - fs.modes()).abs().maxCoeff() < 1e-15);

    ScalarField h1 = transform(exact_heat(f, 1.0), Basis::Physical);
    CHECK(max_abs_diff(h1.values(), RealArray(std::exp(-1.0) * f.values())) < 1e-14);

    CHECK_THROWS_AS(exact_heat(f, -0.1), std::invalid_argument);
}

TEST_CASE("exact_heat: semigroup property and contraction") {
    ScalarField f = random_band_limited(g32, 3, 10);
    ScalarField two = exact_heat(exact_heat(f, 0.3), 0.45);
    ScalarField one = exact_heat(f, 0.75);
    const double scale = one.modes().abs().maxCoeff();
    CHECK((two.modes() - one.modes()).abs().maxCoeff() < 1e-13 * std::max(1.0, scale));

    for (double k : {0.0, 1.0, 2.5}) {
        CHECK(sobolev_seminorm(exact_heat(f, 0.2), k) <= sobolev_seminorm(f, k) * (1.0 + 1e-14));
    }
}

TEST_CASE("bootstrap_experiment: hypothesis and window validation") {
    Grid g(32, 32.0 * M_PI);
    CHECK_THROWS_AS(bootstrap_experiment(0, 3.0, g, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_experiment(-1, 4.0, g, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_experiment(0, 3.5, Grid(32, 2.0 * M_PI), 100.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_experiment(0, 3.5, g, 6.0), std::invalid_argument);
}

TEST_CASE("bootstrap_experiment: zero data is a trivial pass") {
    Grid g(32, 32.0 * M_PI);
    BootstrapReport rep = bootstrap_experiment(0, 3.5, g, 40.0, 0.02, 0.5, false, 0.0);
    CHECK(rep.pass);
    CHECK(rep.times.size() > 10);
}

TEST_CASE("bootstrap_experiment: F = 0 control recovers the -5/2 heat rate") {
    Grid g(32, 32.0 * M_PI);
    BootstrapReport rep = bootstrap_experiment(0, 3.5, g, 100.0, 0.02, 0.25, false);
    CHECK(rep.pass);
    CHECK(std::abs(rep.fit.slope + 2.5) < 0.2);
    CHECK(rep.fit.r2 > 0.99);
}

TEST_CASE("bootstrap_experiment: forced run at the hypothesis edge") {
    Grid g(32, 32.0 * M_PI);
    BootstrapReport rep = bootstrap_experiment(0, 3.5, g, 100.0, 0.02, 0.25, true);
    CHECK(rep.fit.slope <= -2.3);
    CHECK(rep.pass);
}

TEST_CASE("pure-heat Gaussian: ||v|| fits the -3/4 whole-space rate in the window") {
    Grid g(48, 32.0 * M_PI);
    const Eigen::Vector3d c(16.0 * M_PI, 16.0 * M_PI, 16.0 * M_PI);
    ScalarField v0 = gaussian_bump(g, c, 2.0);
    std::vector<double> ts, vals;
    const double t_max = 0.5 * std::pow(g.length() / (2.0 * M_PI), 2); // = 128
    for (double t = 5.0; t <= std::min(100.0, t_max); t += 2.5) {
        ts.push_back(t);
        vals.push_back(sobolev_seminorm(exact_heat(v0, t), 0.0));
    }
    DecayFit fit = fit_decay_samples(ts, vals, "v_l2", 5.0, 100.0);
    CHECK(std::abs(fit.exponent + 0.75) < 0.1);
    CHECK(fit.r2 > 0.999);
}
