#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "pforge/error.hpp"
#include "pforge/weierstrass.hpp"

#include <algorithm>
#include <random>

using namespace pforge;

namespace {

const double pi = oracle::pi;

Params viii(int k, double a = 0.4, double b = 0.7) { return normalize_b0(make_params(Family::CaseVIII, k, a, b)); }

double conformality(const FormsValue& f) {
    cd s = f.phi1 * f.phi1 + f.phi2 * f.phi2 + f.phi3 * f.phi3;
    double n = std::norm(f.phi1) + std::norm(f.phi2) + std::norm(f.phi3);
    return std::abs(s) / n;
}

} // namespace

TEST_CASE("gauss map and height form on explicit points") {
    Params p = viii(1);
    cd u = std::polar(1.0, pi / 4);
    CHECK(std::abs(gauss_map(p, {1.0, u}) - std::polar(1.0, -pi / 4)) <= 1e-15);
    CHECK(std::isinf(std::abs(gauss_map(p, {0.4, 0.0}))));
    // |g| ~ |z|^{(k+2)/(2k+2)} toward z = 0 along a ray
    for (int k = 1; k <= 3; ++k) {
        Params q = viii(k);
        cd dir = std::polar(1.0, 1.0);
        double r1 = 1e-6, r2 = 1e-9;
        double slope = std::log(std::abs(domain_forms(q, r1 * dir).g) / std::abs(domain_forms(q, r2 * dir).g)) /
                       std::log(r1 / r2);
        CHECK(slope == doctest::Approx((k + 2.0) / (2 * k + 2)).epsilon(1e-4));
    }
    // dh is linear in b0
    Params twice = p;
    twice.b0 *= 2.0;
    cd z(0.3, 0.2), seed = sheet_values(p, z)[2];
    CHECK(std::abs(height_coeff(twice, z, seed) - 2.0 * height_coeff(p, z, seed)) <= 1e-14);
}

TEST_CASE("height form signs on the real stretches") {
    for (int k = 1; k <= 3; ++k) {
        Params p = viii(k);
        double beta = p.b0.imag();
        for (double t : {0.05, 0.2, 0.35}) { // (0, a): pure imaginary, -i on the domain branch
            cd dh = domain_forms(p, t).dh_coeff;
            double m = p.a * beta / std::sqrt(t * (p.a - t) * (1 - p.a * t));
            CHECK(std::abs(dh - cd(0, -m)) <= 1e-12 * m);
            // the lift reached from (a, b) below z = a carries +i
            cd mid = 0.5 * (p.a + p.b);
            PathSpec below{{{mid}, {mid - cd(0, 0.3)}, {t - cd(0, 0.3)}, {t}}, upper_branch_u(p, mid), 0.01};
            cd u = continue_u(p, below);
            CHECK(std::abs(height_coeff(p, {t, u}) - cd(0, m)) <= 1e-10 * m);
        }
        for (double t : {0.45, 0.55, 0.65}) { // (a, b): real positive
            cd dh = domain_forms(p, t).dh_coeff;
            double m = p.a * beta / std::sqrt(t * (t - p.a) * (1 - p.a * t));
            CHECK(std::abs(dh - m) <= 1e-12 * m);
        }
    }
}

TEST_CASE("boundary closed forms agree with the continued branch") {
    std::mt19937_64 rng(3);
    for (int k = 1; k <= 3; ++k) {
        Params p = viii(k);
        CAPTURE(k);
        struct S {
            BoundaryStretch s;
            double lo, hi;
        };
        for (S st : {S{BoundaryStretch::I_0a, 0, p.a}, S{BoundaryStretch::I_ab, p.a, p.b},
                     S{BoundaryStretch::I_b1, p.b, 1}, S{BoundaryStretch::Arc, 0, pi},
                     S{BoundaryStretch::I_m10, -1, 0}}) {
            CAPTURE(stretch_name(st.s));
            std::uniform_real_distribution<double> T(st.lo, st.hi);
            for (int i = 0; i < 20; ++i) {
                double t = T(rng);
                cd z = stretch_point(st.s, t);
                FormsValue f = domain_forms(p, z);
                for (Rotation r : {Rotation::Tilde, Rotation::Hat}) {
                    auto [g, dh] = boundary_forms(p, st.s, t, r);
                    cd ref = rotation_factor(k, r) * f.g;
                    CHECK(std::abs(g - ref) <= 1e-10 * std::abs(ref));
                    CHECK(std::abs(dh - f.dh_coeff) <= 1e-10 * std::abs(dh));
                }
            }
        }
        // explicit signs
        for (double t : {0.45, 0.6}) {
            auto [gh, dh] = boundary_forms(p, BoundaryStretch::I_ab, t, Rotation::Hat);
            CHECK(gh.real() > 0);
            CHECK(std::abs(gh.imag()) <= 1e-15 * gh.real());
            CHECK(dh.real() > 0);
            CHECK(std::abs(dh.imag()) <= 1e-15 * dh.real());
        }
        for (double t : {0.1, 0.3}) {
            auto [gt, dh] = boundary_forms(p, BoundaryStretch::I_0a, t, Rotation::Tilde);
            CHECK(std::arg(gt) == doctest::Approx(-pi / (2 * k + 2)).epsilon(1e-13));
            CHECK(std::abs(dh.real()) <= 1e-15 * std::abs(dh));
        }
        CHECK_THROWS_AS(boundary_forms(p, BoundaryStretch::I_ab, 0.9, Rotation::Hat), Error);
    }
}

TEST_CASE("forms are conformal") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> X(-4, 4);
    double worst = 0;
    for (int k = 1; k <= 3; ++k) {
        Params p = viii(k);
        const int N = 2 * k + 2;
        std::uniform_int_distribution<int> J(0, N - 1);
        for (int i = 0; i < 10000 / 3 + 1; ++i) {
            cd z(X(rng), X(rng));
            cd u = sheet_values(p, z)[J(rng)];
            FormsValue f = phi_forms(p, {z, u});
            worst = std::max(worst, conformality(f));
            // metric: sum |phi|^2 = |dh|^2 (|g| + 1/|g|)^2 / 2
            double gm = std::abs(f.g);
            double metric = 0.5 * std::norm(f.dh_coeff) * std::pow(gm + 1 / gm, 2);
            double sum = std::norm(f.phi1) + std::norm(f.phi2) + std::norm(f.phi3);
            REQUIRE(std::abs(sum - metric) <= 1e-12 * metric);
        }
    }
    CHECK(worst <= 1e-10);
    // g real and dh real give phi2 pure imaginary
    Params p = viii(1);
    FormsValue f = domain_forms(p, 0.55);
    FormsValue on_ab = phi_forms(p, {0.55, upper_branch_u(p, 0.55)});
    CHECK(std::abs(on_ab.phi1 - f.phi1) <= 1e-14 * std::abs(f.phi1));
    // at |g| = 1 (the unit circle) the metric is 2 |dh|^2
    for (double t : {0.3, 1.5, 2.8}) {
        FormsValue c = domain_forms(p, std::polar(1.0, t));
        CHECK(std::abs(c.g) == doctest::Approx(1.0).epsilon(1e-13));
        double sum = std::norm(c.phi1) + std::norm(c.phi2) + std::norm(c.phi3);
        CHECK(sum == doctest::Approx(2 * std::norm(c.dh_coeff)).epsilon(1e-12));
        CHECK(c.phi3.real() == doctest::Approx(c.dh_coeff.real()));
    }
    CHECK_THROWS_AS(phi_forms(p, {0.4, 0.0}), Error);
}

TEST_CASE("g real and dh real give phi2 pure imaginary") {
    Params p = viii(2);
    // on (a, b) hat g, dh > 0; undo the rotation so g itself is real
    auto [gh, dh] = boundary_forms(p, BoundaryStretch::I_ab, 0.5, Rotation::Hat);
    cd phi2 = 0.5 * cd(0, 1) * (1.0 / gh + gh) * dh;
    CHECK(std::abs(phi2.real()) <= 1e-15 * std::abs(phi2));
}

TEST_CASE("reflection psi and the screw sigma_2") {
    for (int k = 1; k <= 3; ++k) {
        Params p = viii(k);
        const int N = 2 * k + 2;
        CAPTURE(k);
        std::mt19937_64 rng(17 + k);
        std::uniform_real_distribution<double> X(-2, 2);
        std::vector<double> phases;
        for (int i = 0; i < 10; ++i) {
            cd z(X(rng), X(rng));
            cd u = sheet_values(p, z)[i % N];
            SurfacePoint P{z, u};
            cd g0 = gauss_map(p, P), h0 = height_coeff(p, P);
            cd zq = 1.0 / std::conj(z), jac = -1.0 / (std::conj(z) * std::conj(z)); // d(1/zbar) / dzbar
            // psi(z, u) = (1/zbar, 1/ubar)
            SurfacePoint Q{zq, 1.0 / std::conj(u)};
            CHECK(std::abs(gauss_map(p, Q) * std::conj(g0) - 1.0) <= 1e-12);
            CHECK(std::abs(height_coeff(p, Q) * jac + std::conj(h0)) <= 1e-12 * std::abs(h0));
            // lifts (1/zbar, lambda/ubar) with sigma_2(dh) = conj(dh)
            for (int j = 0; j < N; ++j) {
                SurfacePoint S{zq, std::polar(1.0, 2 * pi * j / N) / std::conj(u)};
                cd h1 = height_coeff(p, S) * jac;
                if (std::abs(h1 - std::conj(h0)) > 1e-10 * std::abs(h0)) continue;
                cd mu = gauss_map(p, S) * h1 / std::conj(h0 / g0);
                CHECK(std::abs(std::abs(mu) - 1) <= 1e-12);
                if (i == 0) phases.push_back(std::arg(mu));
            }
        }
        // the phase set is e^{i pi (k - 2j)/(k+1)}, j = 0..k
        REQUIRE(phases.size() == size_t(k + 1));
        for (int j = 0; j <= k; ++j) {
            cd want = std::polar(1.0, pi * (k - 2 * j) / (k + 1));
            bool hit = std::any_of(phases.begin(), phases.end(),
                                   [&](double ph) { return std::abs(std::polar(1.0, ph) - want) <= 1e-10; });
            CHECK(hit);
        }
    }
    // as stated, over a short arc and its image (odd k)
    for (int k : {1, 3}) {
        Params p = viii(k);
        const int N = 2 * k + 2;
        cd z0(0.6, 0.5);
        PathSpec arc{{{z0}, {z0 + cd(0.04, 0.03)}}, upper_branch_u(p, z0), 0.005};
        TrackedPath tp = track_path(p, arc);
        cd want = std::polar(1.0, -pi / (k + 1));
        bool found = false;
        for (int j = 0; j < N && !found; ++j) {
            cd lam = std::polar(1.0, 2 * pi * j / N);
            cd dh_over_g = 0, dh = 0, img_dh = 0, img_gdh = 0;
            for (const PathNode& nd : tp.nodes) {
                cd z = nd.pt.z;
                SurfacePoint S{1.0 / std::conj(z), lam / std::conj(nd.pt.u)};
                cd dzq = -std::conj(nd.dz) / (std::conj(z) * std::conj(z));
                cd h = height_coeff(p, nd.pt), hs = height_coeff(p, S);
                dh += h * nd.dz;
                dh_over_g += h / gauss_map(p, nd.pt) * nd.dz;
                img_dh += hs * dzq;
                img_gdh += gauss_map(p, S) * hs * dzq;
            }
            if (std::abs(img_dh - std::conj(dh)) > 1e-9 * std::abs(dh)) continue;
            if (std::abs(img_gdh - want * std::conj(dh_over_g)) <= 1e-9 * std::abs(dh_over_g)) found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("real part of the rotated height product vanishes over (b, 1/b)") {
    for (int k = 1; k <= 3; ++k) {
        Params p = viii(k);
        // g dh is regular on (b, 1/b); the substitution t = b + (1/b - b) sin^2 removes the end behaviour
        auto f = [&](const oracle::EndPoint& e) {
            cd v = domain_products(p, e.dl < e.dr ? cd(e.lo) : cd(e.hi), cd(e.dl < e.dr ? e.dl : -e.dr)).g_dh;
            return (rotation_factor(k, Rotation::Tilde) * v).real();
        };
        auto fa = [&](const oracle::EndPoint& e) {
            cd v = domain_products(p, e.dl < e.dr ? cd(e.lo) : cd(e.hi), cd(e.dl < e.dr ? e.dl : -e.dr)).g_dh;
            return std::abs(v);
        };
        double re = oracle::endpoint_integral_ends(f, p.b, 1 / p.b, 8);
        double mag = oracle::endpoint_integral_ends(fa, p.b, 1 / p.b, 8);
        CAPTURE(k);
        CHECK(std::abs(re) <= 1e-9 * mag);
        CHECK(mag > 0.01);
    }
}

TEST_CASE("curvature") {
    for (int k = 1; k <= 3; ++k) {
        Params p = viii(k);
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> X(-3, 3), Y(0.01, 3);
        for (int i = 0; i < 500; ++i) CHECK(domain_curvature(p, cd(X(rng), Y(rng))) <= 0);
        auto sites = dg_zero_sites(p);
        REQUIRE(sites.size() == 4);
        for (cd c : sites) {
            CHECK(std::abs(dg_over_g(p, c)) <= 1e-10);
            for (cd u : sheet_values(p, c)) CHECK(std::abs(gaussian_curvature(p, {c, u})) <= 1e-20);
            // and strictly negative a little away
            CHECK(domain_curvature(p, cd(c.real(), std::abs(c.imag())) + 0.05) < 0);
        }
        // 4 sites times 2k+2 sheets
        CHECK(sites.size() * (2 * k + 2) == size_t(8 * k + 8));
        CHECK(domain_curvature(p, 0.5 * (p.a + p.b)) < 0);
    }
    CHECK_THROWS_AS(domain_curvature(viii(1), 0.0), Error);
}

TEST_CASE("zeros of dg by the argument principle") {
    // winding of dg/g numerator over a large circle counts all finite z-roots
    for (int k = 1; k <= 3; ++k) {
        Params p = viii(k);
        auto sites = dg_zero_sites(p);
        // count zeros of dg/g inside |z - c| = 0.02 around each site: one each
        for (cd c : sites) {
            double wind = 0;
            const int M = 400;
            cd prev = dg_over_g(p, c + 0.02);
            for (int i = 1; i <= M; ++i) {
                cd cur = dg_over_g(p, c + std::polar(0.02, 2 * pi * i / M));
                wind += std::arg(cur / prev);
                prev = cur;
            }
            CHECK(std::round(wind / (2 * pi)) == 1);
        }
    }
}

TEST_CASE("normalization of b0") {
    Params p = normalize_b0(make_params(Family::CaseVIII, 1, 0.4, 0.7));
    CHECK(p.b0.real() == 0);
    CHECK(p.b0.imag() > 0);
    CHECK(p.b0.imag() == doctest::Approx(oracle::b0_beta_k1(0.4)).epsilon(1e-12));
    Params q = normalize_b0(p);
    CHECK(std::abs(q.b0 - p.b0) <= 1e-12 * std::abs(p.b0));
    for (double a : {0.1, 0.6, 0.9}) {
        Params r = normalize_b0(make_params(Family::CaseVIII, 2, a, 0.5 + a / 2));
        CHECK(r.b0.imag() == doctest::Approx(oracle::b0_beta_k1(a)).epsilon(1e-11));
    }
}
