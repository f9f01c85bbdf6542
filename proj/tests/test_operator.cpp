#include <catch2/catch_amalgamated.hpp>

#include "dbvp/catalog.hpp"
#include "dbvp/operator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using dbvp::Breakpoint;
using dbvp::GridProfile;
using dbvp::Integrand2;
using dbvp::PreconditionError;
using dbvp::ProblemSpec;
using dbvp::RegulatedFn;
using dbvp::SolutionProfile;

namespace {

ProblemSpec probe_spec(double c, double beta, double eta) {
    ProblemSpec spec;
    spec.f = dbvp::make_integrand2("const(" + std::to_string(c) + ")");
    spec.g = dbvp::make_integrand2("zero");
    spec.beta = beta;
    spec.eta = eta;
    spec.bounds.k = dbvp::make_integrand("zero");
    spec.bounds.h = dbvp::make_integrand("const(" + std::to_string(std::abs(c)) + ")");
    return spec;
}

ProblemSpec example41_spec() {
    ProblemSpec spec;
    spec.f = dbvp::make_integrand2("f41");
    spec.g = dbvp::make_integrand2("gstar");
    spec.u = dbvp::make_regulated("heaviside(0.5)");
    spec.beta = 4.0;
    spec.eta = 0.25;
    spec.bounds.k = dbvp::make_integrand("k41");
    spec.bounds.h = dbvp::make_integrand("const(1)");
    spec.bounds.m = 1.0;
    return spec;
}

SolutionProfile random_profile(const std::vector<double>& grid, double bound,
                               std::mt19937& rng) {
    SolutionProfile x = SolutionProfile::zeros_on(grid);
    std::uniform_real_distribution<double> val(-bound, bound);
    for (double& v : x.x.values) v = val(rng);
    return x;
}

}  // namespace

TEST_CASE("make_grid contains the base nodes, eta and every breakpoint") {
    ProblemSpec spec = example41_spec();
    spec.eta = 0.1237;  // off the uniform lattice
    auto grid = make_grid(spec, 257);
    REQUIRE(grid.front() == 0.0);
    REQUIRE(grid.back() == 1.0);
    REQUIRE(std::is_sorted(grid.begin(), grid.end()));
    REQUIRE(std::adjacent_find(grid.begin(), grid.end()) == grid.end());
    REQUIRE(std::binary_search(grid.begin(), grid.end(), 0.1237));
    REQUIRE(std::binary_search(grid.begin(), grid.end(), 0.5));
    REQUIRE(grid.size() == 258);  // 257 uniform + eta; the jump of u is a lattice node

    REQUIRE_THROWS_AS(make_grid(spec, 1), PreconditionError);
}

TEST_CASE("validate_spec rejects out-of-range data") {
    ProblemSpec spec = example41_spec();
    REQUIRE_NOTHROW(validate_spec(spec));

    spec.eta = 2.0;
    REQUIRE_THROWS_AS(validate_spec(spec), PreconditionError);
    spec.eta = 0.25;

    spec.bounds.m = -1.0;
    REQUIRE_THROWS_AS(validate_spec(spec), PreconditionError);
    spec.bounds.m = 1.0;

    // g must vanish at t = 0 for every x; a constant-one g does not
    spec.g = dbvp::make_integrand2("one");
    REQUIRE_THROWS_AS(validate_spec(spec), PreconditionError);
}

TEST_CASE("constant forcing reproduces the closed-form operator image") {
    // with f = c and g = 0:  Tx(t) = c(1+eta)(t+beta)/2 - c t^2/2
    const double cs[] = {1.0, -2.5};
    const std::pair<double, double> corners[] = {{4.0, 0.25}, {-1.0 / 6.0, 2.0 / 3.0}, {0.5, 1.0}};
    for (double c : cs) {
        for (auto [beta, eta] : corners) {
            ProblemSpec spec = probe_spec(c, beta, eta);
            auto x = SolutionProfile::zeros_on(make_grid(spec, 257));
            auto tx = apply_T(spec, x);
            REQUIRE(tx.x0 == beta * tx.dx0);
            REQUIRE(tx.x.at(0) == tx.x0);
            const auto& grid = x.grid();
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double t = grid[i];
                const double want_x = c * (1.0 + eta) * (t + beta) / 2.0 - c * t * t / 2.0;
                const double want_dx = c * (1.0 + eta) / 2.0 - c * t;
                REQUIRE(std::abs(tx.x.at(i) - want_x) < 1e-13);
                REQUIRE(std::abs(tx.dx.at(i) - want_dx) < 1e-13);
            }
        }
    }
}

TEST_CASE("profile_F uses the exact antiderivative when f ignores x") {
    ProblemSpec spec;
    spec.f = dbvp::make_integrand2("h42");
    spec.g = dbvp::make_integrand2("zero");
    auto x = SolutionProfile::zeros_on(make_grid(spec, 129));
    auto F = profile_F(spec, x);
    const auto h42 = dbvp::make_integrand("h42");
    for (std::size_t i = 0; i < x.grid().size(); ++i) {
        REQUIRE(F.at(i) == h42.antiderivative(x.grid()[i]) - h42.antiderivative(0.0));
    }
    REQUIRE(F.jumps.empty());
}

TEST_CASE("profile_F integrates through the interpolated iterate") {
    // f(t,x) = x with x(t) = t gives F(t) = t^2/2
    ProblemSpec spec;
    Integrand2 f;
    f.fn = [](double, double x) { return x; };
    f.depends_on_x = true;
    spec.f = f;
    spec.g = dbvp::make_integrand2("zero");
    auto x = SolutionProfile::zeros_on(make_grid(spec, 257));
    for (std::size_t i = 0; i < x.grid().size(); ++i) x.x.values[i] = x.grid()[i];
    auto F = profile_F(spec, x, 1e-10);
    for (std::size_t i = 0; i < x.grid().size(); ++i) {
        const double t = x.grid()[i];
        REQUIRE(std::abs(F.at(i) - 0.5 * t * t) < 1e-12);
    }
}

TEST_CASE("profile_G carries the heaviside jump with one-sided values") {
    ProblemSpec spec;
    spec.f = dbvp::make_integrand2("zero");
    spec.g = dbvp::make_integrand2("gstar");
    spec.u = dbvp::make_regulated("heaviside(0.5)");
    auto x = SolutionProfile::zeros_on(make_grid(spec, 129));
    auto G = profile_G(spec, x);
    REQUIRE(G.jumps.size() == 1);
    const Breakpoint& j = G.jumps.front();
    REQUIRE(j.t == 0.5);
    REQUIRE(j.left == 0.0);
    REQUIRE(j.at == 1.0);  // heaviside takes its upper value at the step
    REQUIRE(j.right == 1.0);
    for (std::size_t i = 0; i < x.grid().size(); ++i) {
        REQUIRE(G.at(i) == (x.grid()[i] < 0.5 ? 0.0 : 1.0));
    }
}

TEST_CASE("profile_G handles an interior step with distinct one-sided values") {
    // step integrator: u = 2 on [0, 0.3), -1 on [0.3, 0.7), 0.5 on [0.7, 1]
    ProblemSpec spec;
    Integrand2 g;
    g.fn = [](double t, double) { return t; };  // g(0,x) = 0 as required
    g.depends_on_x = true;                      // forces the general path
    spec.f = dbvp::make_integrand2("zero");
    spec.g = g;
    spec.u = dbvp::make_regulated("step(0.3,0.7; 2,-1,0.5)");
    auto x = SolutionProfile::zeros_on(make_grid(spec, 129));
    auto G = profile_G(spec, x);
    REQUIRE(G.jumps.size() == 2);
    // at 0.3 the integrator drops by 3, at 0.7 it rises by 1.5; g(t,.) = t
    const Breakpoint& a = G.jumps[0];
    REQUIRE(a.t == 0.3);
    REQUIRE(std::abs((a.right - a.left) - 0.3 * (-3.0)) < 1e-12);
    const Breakpoint& b = G.jumps[1];
    REQUIRE(b.t == 0.7);
    REQUIRE(std::abs((b.right - b.left) - 0.7 * 1.5) < 1e-12);
    // step functions take the post-jump value at the point
    REQUIRE(a.at == a.right);
    REQUIRE(b.at == b.right);
    // G stays flat between jumps
    const double g_mid = G.value_at(0.5);
    const double g_late = G.value_at(0.65);
    REQUIRE(g_mid == g_late);
}

TEST_CASE("operator inner integral against du matches the primitive of u") {
    // with f = 0, g = g* and u = W:  Tx(t) = (t+beta) dx0 - int_0^t W,
    // so the primitive of W is recoverable from the image exactly
    ProblemSpec spec;
    spec.f = dbvp::make_integrand2("zero");
    spec.g = dbvp::make_integrand2("gstar");
    spec.u = dbvp::make_regulated("weierstrass(1e-12)");
    spec.beta = 0.25;
    spec.eta = 0.5;
    auto x = SolutionProfile::zeros_on(make_grid(spec, 257));
    auto tx = apply_T(spec, x);
    const auto w = dbvp::make_integrand("weierstrass(1e-12)");
    for (std::size_t i = 0; i < x.grid().size(); ++i) {
        const double t = x.grid()[i];
        const double ii_g = (t + spec.beta) * tx.dx0 - tx.x.at(i);
        REQUIRE(std::abs(ii_g - w.antiderivative(t)) < 1e-12);
    }
}

TEST_CASE("derivative profile is consistent with a central difference of x") {
    ProblemSpec spec = example41_spec();
    auto x = SolutionProfile::zeros_on(make_grid(spec, 1025));
    auto tx = apply_T(spec, x);
    const auto& grid = x.grid();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        if (grid[i - 1] < 0.5 && grid[i + 1] > 0.5) continue;  // straddles the kink
        if (grid[i] == 0.5) continue;
        const double h1 = grid[i + 1] - grid[i - 1];
        const double fd = (tx.x.at(i + 1) - tx.x.at(i - 1)) / h1;
        worst = std::max(worst, std::abs(fd - tx.dx.at(i)));
    }
    REQUIRE(worst < 1e-4);  // second-order one-grid agreement
}

TEST_CASE("jump of DTx transfers -g(tau, x(tau)) times the jump of u") {
    ProblemSpec spec = example41_spec();
    auto grid = make_grid(spec, 513);
    std::mt19937 rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        auto x = random_profile(grid, 3.0, rng);
        auto tx = apply_T(spec, x);
        REQUIRE(tx.dx.jumps.size() == 1);
        const Breakpoint& j = tx.dx.jumps.front();
        REQUIRE(j.t == 0.5);
        // g* is identically 1 away from t = 0 and the heaviside jumps by 1
        REQUIRE(std::abs((j.right - j.left) - (-1.0)) < 1e-12);
        // x itself stays continuous across the jump of u
        const Breakpoint* xj = tx.x.jump_at(0.5);
        REQUIRE(xj != nullptr);
        REQUIRE(xj->left == xj->right);
        REQUIRE(xj->left == xj->at);
    }
}

TEST_CASE("boundary identity Tx(0) = beta DTx(0) holds bit-for-bit") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> betas(-3.0, 5.0);
    std::uniform_real_distribution<double> etas(0.0, 1.0);
    const char* gs[] = {"zero", "gstar"};
    const char* us[] = {"heaviside(0.25)", "weierstrass(1e-10)", "step(0.5; 1,2)", "zero"};
    for (int trial = 0; trial < 25; ++trial) {
        ProblemSpec spec;
        spec.f = dbvp::make_integrand2("f41");
        spec.g = dbvp::make_integrand2(gs[trial % 2]);
        spec.u = dbvp::make_regulated(us[trial % 4]);
        spec.beta = betas(rng);
        spec.eta = etas(rng);
        auto grid = make_grid(spec, 65);
        auto x = random_profile(grid, 2.0, rng);
        auto tx = apply_T(spec, x, 1e-8);
        REQUIRE(tx.x0 == spec.beta * tx.dx0);
        REQUIRE(tx.x.at(0) == tx.x0);
    }
}

TEST_CASE("operator maps the example ball into itself") {
    ProblemSpec spec = example41_spec();
    const double radius = 18.0 / (1.0 - 4.0 * (std::sqrt(6.0) - std::sqrt(5.0)));
    auto grid = make_grid(spec, 257);
    std::mt19937 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        auto x = random_profile(grid, radius, rng);
        auto tx = apply_T(spec, x, 1e-8);
        REQUIRE(tx.norm_x() <= radius + 1e-6);
    }
}

TEST_CASE("reconstruct_Dx agrees with the derivative emitted by apply_T") {
    // forcing independent of x, so the reconstruction sees the same
    // integrands apply_T used regardless of which iterate it is handed
    ProblemSpec spec;
    spec.f = dbvp::make_integrand2("expr(h42)");
    spec.g = dbvp::make_integrand2("gstar");
    spec.u = dbvp::make_regulated("heaviside(0.5)");
    spec.beta = -1.0 / 6.0;
    spec.eta = 2.0 / 3.0;
    auto x = SolutionProfile::zeros_on(make_grid(spec, 257));
    auto tx = apply_T(spec, x);
    auto dx = reconstruct_Dx(spec, tx);
    REQUIRE(dx.values.size() == tx.dx.values.size());
    for (std::size_t i = 0; i < dx.values.size(); ++i) {
        REQUIRE(std::abs(dx.at(i) - tx.dx.at(i)) < 1e-10);
    }
    REQUIRE(dx.jumps.size() == tx.dx.jumps.size());
}

TEST_CASE("profile_G refuses an iterate with runaway variation") {
    ProblemSpec spec;
    Integrand2 g;
    // highly oscillatory in t through x: variation along the grid keeps
    // growing as the partition refines
    g.fn = [](double t, double) { return t == 0.0 ? 0.0 : t * std::sin(1.0 / (t * t * t)); };
    g.depends_on_x = true;
    spec.f = dbvp::make_integrand2("zero");
    spec.g = g;
    spec.u = dbvp::make_regulated("weierstrass(1e-10)");
    auto x = SolutionProfile::zeros_on(make_grid(spec, 257));
    REQUIRE_THROWS_AS(profile_G(spec, x), PreconditionError);
}
